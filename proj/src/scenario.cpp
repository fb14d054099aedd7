// Copyright 2026 The Hypercog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hypercog/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hypercog {

using Eigen::Vector2d;
using Json = nlohmann::json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

}  // namespace

PlanarCurve::PlanarCurve(std::vector<Vector2d> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("a curve needs at least two points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if ((points_[i] - points_[i - 1]).norm() == 0.0) {
      throw std::invalid_argument("curve has repeated consecutive points");
    }
  }
}

LineCoefficients PlanarCurve::tangent_at(const Vector2d& point, Side permitted) const {
  double best = std::numeric_limits<double>::infinity();
  Vector2d foot;
  Vector2d direction;
  bool inside = false;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vector2d p0 = points_[i];
    const Vector2d seg = points_[i + 1] - p0;
    const double t_raw = (point - p0).dot(seg) / seg.squaredNorm();
    const double t = std::clamp(t_raw, 0.0, 1.0);
    const Vector2d q = p0 + t * seg;
    const double dist = (point - q).norm();
    if (dist < best) {
      best = dist;
      foot = q;
      direction = seg.normalized();
      const bool before_start = i == 0 && t_raw < 0.0;
      const bool after_end = i + 2 == points_.size() && t_raw > 1.0;
      inside = !before_start && !after_end;
    }
  }
  if (!inside) throw std::out_of_range("projection falls outside the curve");
  const Vector2d left(-direction.y(), direction.x());
  const Vector2d normal = permitted == Side::kLeft ? Vector2d(-left) : left;
  return {normal.x(), normal.y(), -normal.dot(foot)};
}

LaneGeometry::LaneGeometry(int lane_count, double lane_width, double x_min, double x_max)
    : lane_count_(lane_count), lane_width_(lane_width) {
  if (lane_count < 1) throw std::invalid_argument("lane_count must be at least 1");
  if (!(lane_width > 0.0)) throw std::invalid_argument("lane_width must be positive");
  if (!(x_max > x_min)) throw std::invalid_argument("road extent is empty");
  for (int j = 0; j <= lane_count; ++j) {
    const double y = j * lane_width;
    boundaries_.emplace_back(std::vector<Vector2d>{{x_min, y}, {x_max, y}});
  }
  for (int l = 0; l < lane_count; ++l) {
    const double y = (l + 0.5) * lane_width;
    centerlines_.emplace_back(std::vector<Vector2d>{{x_min, y}, {x_max, y}});
  }
}

double LaneGeometry::centerline_y(int lane) const {
  if (lane < 0 || lane >= lane_count_) throw std::out_of_range("lane index out of range");
  return (lane + 0.5) * lane_width_;
}

double LaneGeometry::boundary_y(int boundary) const {
  if (boundary < 0 || boundary > lane_count_) {
    throw std::out_of_range("boundary index out of range");
  }
  return boundary * lane_width_;
}

const PlanarCurve& LaneGeometry::curve(CurveId id) const {
  const auto& set = id.kind == CurveKind::kBoundary ? boundaries_ : centerlines_;
  if (id.index < 0 || id.index >= static_cast<int>(set.size())) {
    throw std::out_of_range("curve index out of range");
  }
  return set[id.index];
}

LineCoefficients LaneGeometry::tangent_at(CurveId id, const Vector2d& point,
                                          Side permitted) const {
  return curve(id).tangent_at(point, permitted);
}

BehaviorSpec BehaviorSpec::straight(int lane, Vector2d direction) {
  BehaviorSpec b;
  b.kind = BehaviorKind::kStraight;
  b.lane = lane;
  b.target_lane = lane;
  b.direction = direction;
  return b;
}

BehaviorSpec BehaviorSpec::lane_change(int source_lane, int target_lane, double start_x) {
  BehaviorSpec b;
  b.kind = BehaviorKind::kLaneChange;
  b.lane = source_lane;
  b.target_lane = target_lane;
  b.start_x = start_x;
  return b;
}

std::string_view to_string(DrivingStyle style) {
  switch (style) {
    case DrivingStyle::kPoseTracking:
      return "pose_tracking";
    case DrivingStyle::kVelocityConsistent:
      return "velocity_consistent";
    case DrivingStyle::kComfortOriented:
      return "comfort_oriented";
  }
  return "unknown";
}

DrivingStyle parse_driving_style(std::string_view text) {
  if (text == "pose_tracking") return DrivingStyle::kPoseTracking;
  if (text == "velocity_consistent") return DrivingStyle::kVelocityConsistent;
  if (text == "comfort_oriented") return DrivingStyle::kComfortOriented;
  throw std::invalid_argument("unknown driving style '" + std::string(text) + "'");
}

std::string_view to_string(BehaviorKind kind) {
  return kind == BehaviorKind::kStraight ? "straight" : "lane_change";
}

std::vector<int> effective_indices(BehaviorKind kind) {
  if (kind == BehaviorKind::kStraight) return {kThetaPx, kThetaV, kThetaA};
  return {kThetaPx, kThetaPy, kThetaV, kThetaPsi, kThetaA, kThetaDelta};
}

Eigen::VectorXd effective_part(const Theta& theta, BehaviorKind kind) {
  const auto idx = effective_indices(kind);
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = theta(idx[i]);
  return out;
}

Theta normalize_effective(const Theta& theta, BehaviorKind kind) {
  const double norm = effective_part(theta, kind).norm();
  if (!(norm > 0.0)) throw std::invalid_argument("effective weights have zero norm");
  return theta / norm;
}

bool StyleWeights::within_bounds() const {
  return theta.minCoeff() >= bounds.min && theta.maxCoeff() <= bounds.max;
}

StyleWeights style_weights_for(BehaviorKind behavior, DrivingStyle style, ThetaBounds bounds) {
  Theta theta = Theta::Ones();
  if (behavior == BehaviorKind::kStraight) {
    switch (style) {
      case DrivingStyle::kPoseTracking:
        theta(kThetaPx) = 10.0;
        break;
      case DrivingStyle::kVelocityConsistent:
        theta(kThetaV) = 10.0;
        break;
      case DrivingStyle::kComfortOriented:
        theta(kThetaA) = 10.0;
        break;
    }
  } else {
    switch (style) {
      case DrivingStyle::kPoseTracking:
        theta(kThetaPx) = theta(kThetaPy) = theta(kThetaPsi) = 10.0;
        break;
      case DrivingStyle::kVelocityConsistent:
        theta(kThetaV) = 10.0;
        break;
      case DrivingStyle::kComfortOriented:
        theta(kThetaDelta) = 10.0;
        break;
    }
  }
  return {normalize_effective(theta, behavior), bounds};
}

ReferenceTrajectory ReferenceTrajectory::slice(int offset, int count) const {
  if (offset < 0 || count < 0 || offset + count > size()) {
    throw std::out_of_range("reference slice out of range");
  }
  ReferenceTrajectory out;
  out.first_step = first_step + offset;
  out.states.assign(states.begin() + offset, states.begin() + offset + count);
  return out;
}

namespace scenario {

ReferenceTrajectory build_reference(const BehaviorSpec& behavior, const VehicleState& initial,
                                    int horizon, double ts, const LaneGeometry& lanes,
                                    double transition_length) {
  if (horizon < 2) throw std::invalid_argument("horizon must be at least 2");
  if (!(ts > 0.0)) throw std::invalid_argument("sampling period must be positive");
  ReferenceTrajectory ref;
  ref.states.reserve(horizon);
  const double step = initial.v * ts;

  if (behavior.kind == BehaviorKind::kStraight) {
    const Vector2d d = behavior.direction;
    if (std::abs(d.norm() - 1.0) > 1e-9) throw std::invalid_argument("direction must be unit");
    const double y_c = lanes.centerline_y(behavior.lane);
    // Start from the projection of the initial position onto the centerline.
    const Vector2d origin(initial.px, y_c);
    const double psi = std::atan2(d.y(), d.x());
    for (int k = 0; k < horizon; ++k) {
      const Vector2d p = origin + k * step * d;
      ref.states.push_back({p.x(), p.y(), initial.v, psi});
    }
    return ref;
  }

  if (!(transition_length > 0.0)) throw std::invalid_argument("transition_length must be positive");
  const double y0 = lanes.centerline_y(behavior.lane);
  const double y1 = lanes.centerline_y(behavior.target_lane);
  const double x_end = initial.px + (horizon - 1) * step;
  if (x_end < behavior.start_x + transition_length) {
    throw std::invalid_argument("lane change does not finish within the horizon");
  }
  for (int k = 0; k < horizon; ++k) {
    const double x = initial.px + k * step;
    const double sigma = std::clamp((x - behavior.start_x) / transition_length, 0.0, 1.0);
    const double s2 = sigma * sigma;
    const double shape = s2 * sigma * (10.0 - 15.0 * sigma + 6.0 * s2);
    const double dshape = 30.0 * s2 * (1.0 - 2.0 * sigma + s2) / transition_length;
    const double y = y0 + (y1 - y0) * shape;
    const double psi = std::atan((y1 - y0) * dshape);
    ref.states.push_back({x, y, initial.v / std::cos(psi), psi});
  }
  return ref;
}

int nearest_longitudinal_index(const ReferenceTrajectory& reference, double px) {
  if (reference.states.empty()) throw std::invalid_argument("empty reference");
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < reference.size(); ++k) {
    const double dist = std::abs(reference.states[k].px - px);
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

}  // namespace scenario

const VehicleConfig& ScenarioConfig::hv() const {
  for (const auto& v : vehicles) {
    if (v.role == VehicleRole::kHuman) return v;
  }
  throw std::invalid_argument("scenario has no human-driven vehicle");
}

const VehicleConfig& ScenarioConfig::vehicle(int id) const {
  for (const auto& v : vehicles) {
    if (v.id == id) return v;
  }
  throw std::out_of_range("no vehicle with id " + std::to_string(id));
}

LaneGeometry ScenarioConfig::lane_geometry() const { return LaneGeometry(lane_count, lane_width); }

void ScenarioConfig::validate() const {
  if (horizon < 2) fail("horizon", "must be at least 2");
  if (!(ts > 0.0)) fail("ts", "must be positive");
  if (!(transition_length > 0.0)) fail("transition_length", "must be positive");
  if (lane_count < 1) fail("road.lane_count", "must be at least 1");
  if (!(lane_width > 0.0)) fail("road.lane_width", "must be positive");
  if (!(limits.v_min < limits.v_max)) fail("limits.v", "min must be below max");
  if (!(limits.a_min < limits.a_max)) fail("limits.a", "min must be below max");
  if (!(limits.delta_min < limits.delta_max)) fail("limits.delta", "min must be below max");
  if (limits.delta_min <= -std::numbers::pi / 2 || limits.delta_max >= std::numbers::pi / 2) {
    fail("limits.delta", "must lie strictly inside (-90, 90) degrees");
  }
  if (!(theta_bounds.min > 0.0) || !(theta_bounds.max > theta_bounds.min)) {
    fail("theta_bounds", "need 0 < min < max");
  }
  if (!(noise.std >= 0.0)) fail("noise.std", "must be non-negative");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    fail("solver", e.what());
  }
  if (!(inverse.kappa_offline > 0.0)) fail("inverse.kappa_offline", "must be positive");
  if (!(inverse.kappa_online > 0.0)) fail("inverse.kappa_online", "must be positive");
  if (!(inverse.omega_dist >= 0.0)) fail("inverse.omega_dist", "must be non-negative");
  if (inverse.conservative_from_stage < 1) fail("inverse.conservative_from_stage", "must be at least 1");

  if (!stage_boundaries.empty()) {
    if (stage_boundaries.size() < 2) fail("stage_boundaries", "need at least two entries");
    if (stage_boundaries.front() != 0) fail("stage_boundaries", "must start at 0");
    if (stage_boundaries.back() != horizon - 1) {
      fail("stage_boundaries", "must end at horizon - 1 = " + std::to_string(horizon - 1));
    }
    for (std::size_t i = 1; i < stage_boundaries.size(); ++i) {
      if (stage_boundaries[i] <= stage_boundaries[i - 1]) {
        fail("stage_boundaries", "must be strictly increasing");
      }
    }
  }

  if (vehicles.empty()) fail("vehicles", "at least one vehicle is required");
  std::set<int> ids;
  int humans = 0;
  for (const auto& v : vehicles) {
    const std::string field = "vehicles[id=" + std::to_string(v.id) + "]";
    if (!ids.insert(v.id).second) fail(field, "duplicate vehicle id " + std::to_string(v.id));
    if (v.role == VehicleRole::kHuman) ++humans;
    try {
      v.geometry.validate();
    } catch (const std::invalid_argument& e) {
      fail(field + ".geometry", e.what());
    }
    if (!(lane_width > v.geometry.width)) fail(field + ".geometry", "wider than the lane");
    const auto check_lane = [&](int lane, const char* name) {
      if (lane < 0 || lane >= lane_count) fail(field + ".behavior." + name, "lane out of range");
    };
    check_lane(v.behavior.lane, "lane");
    if (v.behavior.kind == BehaviorKind::kLaneChange) {
      check_lane(v.behavior.target_lane, "target_lane");
      if (v.behavior.target_lane == v.behavior.lane) {
        fail(field + ".behavior", "target lane equals source lane");
      }
    } else if (std::abs(v.behavior.direction.norm() - 1.0) > 1e-9) {
      fail(field + ".behavior.direction", "must be a unit vector");
    }
    if (v.initial.v < limits.v_min || v.initial.v > limits.v_max) {
      fail(field + ".initial.v", "outside the speed limits");
    }
    if (!v.theta_true.within_bounds()) fail(field + ".theta", "outside theta_bounds");
  }
  if (humans != 1) fail("vehicles", "exactly one human-driven vehicle is required");
  if (hv().id != 0) fail("vehicles", "the human-driven vehicle must have id 0");
}

namespace scenario {
namespace {

Json state_to_json(const VehicleState& s) {
  return {{"px", s.px}, {"py", s.py}, {"v", s.v}, {"psi_deg", s.psi / kDegToRad}};
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

VehicleConfig parse_vehicle(const Json& j, const std::string& path, const ThetaBounds& bounds) {
  if (!j.is_object()) fail(path, "must be an object");
  VehicleConfig v;
  if (!j.contains("id")) fail(path + ".id", "is required");
  v.id = get_or<int>(j, "id", 0, path);
  const std::string role = get_or<std::string>(j, "role", "cav", path);
  if (role == "human" || role == "hv") {
    v.role = VehicleRole::kHuman;
  } else if (role == "cav" || role == "connected") {
    v.role = VehicleRole::kConnected;
  } else {
    fail(path + ".role", "must be 'human' or 'cav'");
  }
  if (j.contains("geometry")) {
    const Json& g = j.at("geometry");
    const std::string gp = path + ".geometry";
    v.geometry.length = get_or<double>(g, "length", v.geometry.length, gp);
    v.geometry.width = get_or<double>(g, "width", v.geometry.width, gp);
    v.geometry.extended_length = get_or<double>(g, "extended_length", v.geometry.extended_length, gp);
    v.geometry.extended_width = get_or<double>(g, "extended_width", v.geometry.extended_width, gp);
  }
  if (!j.contains("initial")) fail(path + ".initial", "is required");
  const Json& s = j.at("initial");
  const std::string sp = path + ".initial";
  v.initial.px = get_or<double>(s, "px", 0.0, sp);
  v.initial.py = get_or<double>(s, "py", 0.0, sp);
  v.initial.v = get_or<double>(s, "v", 10.0, sp);
  v.initial.psi = get_or<double>(s, "psi_deg", 0.0, sp) * kDegToRad;

  if (!j.contains("behavior")) fail(path + ".behavior", "is required");
  const Json& b = j.at("behavior");
  const std::string bp = path + ".behavior";
  const std::string kind = get_or<std::string>(b, "kind", "straight", bp);
  if (kind == "straight") {
    Vector2d d(1.0, 0.0);
    if (b.contains("direction")) {
      const auto dir = get_or<std::vector<double>>(b, "direction", {}, bp);
      if (dir.size() != 2) fail(bp + ".direction", "must have two entries");
      d = Vector2d(dir[0], dir[1]);
    }
    v.behavior = BehaviorSpec::straight(get_or<int>(b, "lane", 0, bp), d);
  } else if (kind == "lane_change") {
    if (!b.contains("target_lane")) fail(bp + ".target_lane", "is required");
    v.behavior = BehaviorSpec::lane_change(get_or<int>(b, "lane", 0, bp),
                                           get_or<int>(b, "target_lane", 0, bp),
                                           get_or<double>(b, "start_x", 0.0, bp));
  } else {
    fail(bp + ".kind", "must be 'straight' or 'lane_change'");
  }

  try {
    v.style = parse_driving_style(get_or<std::string>(j, "style", "comfort_oriented", path));
  } catch (const std::invalid_argument& e) {
    fail(path + ".style", e.what());
  }
  v.theta_true = style_weights_for(v.behavior.kind, v.style, bounds);
  if (j.contains("theta")) {
    const auto t = get_or<std::vector<double>>(j, "theta", {}, path);
    if (t.size() != 6) fail(path + ".theta", "must have six entries");
    Theta theta;
    for (int i = 0; i < 6; ++i) theta(i) = t[i];
    if (theta.minCoeff() <= 0.0) fail(path + ".theta", "entries must be positive");
    v.theta_true.theta = normalize_effective(theta, v.behavior.kind);
  }
  return v;
}

}  // namespace

ScenarioConfig load_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed document: ") + e.what());
  }
  if (!j.is_object()) fail("config", "top level must be an object");

  ScenarioConfig c;
  const std::string root = "config";
  c.name = get_or<std::string>(j, "name", c.name, root);
  c.horizon = get_or<int>(j, "horizon", c.horizon, root);
  c.ts = get_or<double>(j, "ts", c.ts, root);
  c.transition_length = get_or<double>(j, "transition_length", c.transition_length, root);
  c.stage_boundaries = get_or<std::vector<int>>(j, "stage_boundaries", {}, root);
  if (j.contains("road")) {
    const Json& r = j.at("road");
    c.lane_count = get_or<int>(r, "lane_count", c.lane_count, "road");
    c.lane_width = get_or<double>(r, "lane_width", c.lane_width, "road");
  }
  if (j.contains("limits")) {
    const Json& l = j.at("limits");
    c.limits.v_min = get_or<double>(l, "v_min", c.limits.v_min, "limits");
    c.limits.v_max = get_or<double>(l, "v_max", c.limits.v_max, "limits");
    c.limits.a_min = get_or<double>(l, "a_min", c.limits.a_min, "limits");
    c.limits.a_max = get_or<double>(l, "a_max", c.limits.a_max, "limits");
    c.limits.delta_min =
        get_or<double>(l, "delta_min_deg", c.limits.delta_min / kDegToRad, "limits") * kDegToRad;
    c.limits.delta_max =
        get_or<double>(l, "delta_max_deg", c.limits.delta_max / kDegToRad, "limits") * kDegToRad;
  }
  if (j.contains("theta_bounds")) {
    const Json& t = j.at("theta_bounds");
    c.theta_bounds.min = get_or<double>(t, "min", c.theta_bounds.min, "theta_bounds");
    c.theta_bounds.max = get_or<double>(t, "max", c.theta_bounds.max, "theta_bounds");
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    c.noise.std = get_or<double>(n, "std", c.noise.std, "noise");
    c.noise.seed = get_or<std::uint64_t>(n, "seed", c.noise.seed, "noise");
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    c.solver.constraint_violation_threshold = get_or<double>(
        s, "constraint_violation_threshold", c.solver.constraint_violation_threshold, "solver");
    c.solver.relative_step_progress =
        get_or<double>(s, "relative_step_progress", c.solver.relative_step_progress, "solver");
    c.solver.max_iterations = get_or<int>(s, "max_iterations", c.solver.max_iterations, "solver");
    c.solver.qp_tolerance = get_or<double>(s, "qp_tolerance", c.solver.qp_tolerance, "solver");
  }
  if (j.contains("inverse")) {
    const Json& i = j.at("inverse");
    c.inverse.kappa_offline = get_or<double>(i, "kappa_offline", c.inverse.kappa_offline, "inverse");
    c.inverse.kappa_online = get_or<double>(i, "kappa_online", c.inverse.kappa_online, "inverse");
    c.inverse.omega_dist = get_or<double>(i, "omega_dist", c.inverse.omega_dist, "inverse");
    c.inverse.conservative_from_stage = get_or<int>(
        i, "conservative_from_stage", c.inverse.conservative_from_stage, "inverse");
  }
  if (!j.contains("vehicles") || !j.at("vehicles").is_array()) {
    fail("vehicles", "must be an array");
  }
  // Theta bounds are needed before vehicles so that defaults carry them.
  const auto& list = j.at("vehicles");
  for (std::size_t i = 0; i < list.size(); ++i) {
    c.vehicles.push_back(parse_vehicle(list[i], "vehicles[" + std::to_string(i) + "]",
                                       c.theta_bounds));
  }
  std::sort(c.vehicles.begin(), c.vehicles.end(),
            [](const VehicleConfig& a, const VehicleConfig& b) { return a.id < b.id; });
  c.validate();
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str());
}

std::string dump_config(const ScenarioConfig& c) {
  Json j;
  j["name"] = c.name;
  j["horizon"] = c.horizon;
  j["ts"] = c.ts;
  j["transition_length"] = c.transition_length;
  j["stage_boundaries"] = c.stage_boundaries;
  j["road"] = {{"lane_count", c.lane_count}, {"lane_width", c.lane_width}};
  j["limits"] = {{"v_min", c.limits.v_min},
                 {"v_max", c.limits.v_max},
                 {"a_min", c.limits.a_min},
                 {"a_max", c.limits.a_max},
                 {"delta_min_deg", c.limits.delta_min / kDegToRad},
                 {"delta_max_deg", c.limits.delta_max / kDegToRad}};
  j["theta_bounds"] = {{"min", c.theta_bounds.min}, {"max", c.theta_bounds.max}};
  j["noise"] = {{"std", c.noise.std}, {"seed", c.noise.seed}};
  j["solver"] = {{"constraint_violation_threshold", c.solver.constraint_violation_threshold},
                 {"relative_step_progress", c.solver.relative_step_progress},
                 {"max_iterations", c.solver.max_iterations},
                 {"qp_tolerance", c.solver.qp_tolerance}};
  j["inverse"] = {{"kappa_offline", c.inverse.kappa_offline},
                  {"kappa_online", c.inverse.kappa_online},
                  {"omega_dist", c.inverse.omega_dist},
                  {"conservative_from_stage", c.inverse.conservative_from_stage}};
  Json list = Json::array();
  for (const auto& v : c.vehicles) {
    Json jv;
    jv["id"] = v.id;
    jv["role"] = v.role == VehicleRole::kHuman ? "human" : "cav";
    jv["geometry"] = {{"length", v.geometry.length},
                      {"width", v.geometry.width},
                      {"extended_length", v.geometry.extended_length},
                      {"extended_width", v.geometry.extended_width}};
    jv["initial"] = state_to_json(v.initial);
    if (v.behavior.kind == BehaviorKind::kStraight) {
      jv["behavior"] = {{"kind", "straight"},
                        {"lane", v.behavior.lane},
                        {"direction", {v.behavior.direction.x(), v.behavior.direction.y()}}};
    } else {
      jv["behavior"] = {{"kind", "lane_change"},
                        {"lane", v.behavior.lane},
                        {"target_lane", v.behavior.target_lane},
                        {"start_x", v.behavior.start_x}};
    }
    jv["style"] = std::string(to_string(v.style));
    jv["theta"] = std::vector<double>(v.theta_true.theta.data(), v.theta_true.theta.data() + 6);
    list.push_back(jv);
  }
  j["vehicles"] = list;
  return j.dump(2);
}

namespace {

VehicleConfig make_vehicle(int id, VehicleRole role, double px, int lane, BehaviorSpec behavior,
                           DrivingStyle style, const Theta& theta, double lane_width) {
  VehicleConfig v;
  v.id = id;
  v.role = role;
  v.initial = {px, (lane + 0.5) * lane_width, 10.0, 0.0};
  v.behavior = behavior;
  v.style = style;
  v.theta_true.theta = normalize_effective(theta, behavior.kind);
  return v;
}

Theta straight_theta(double px, double v, double a) {
  Theta t = Theta::Ones();
  t(kThetaPx) = px;
  t(kThetaV) = v;
  t(kThetaA) = a;
  return t;
}

}  // namespace

ScenarioConfig offline_lane_change_config() {
  ScenarioConfig c;
  c.name = "offline_lane_change";
  c.horizon = 36;
  // The default step-progress threshold stops the sweeps before best-response
  // gaps are small; see README.
  c.solver.relative_step_progress = 1e-6;
  const double w = c.lane_width;
  Theta cav1;
  cav1 << 1.2, 1.0, 1.0, 1.0, 1.0, 8.0;
  c.vehicles = {
      make_vehicle(0, VehicleRole::kHuman, 0.0, 1, BehaviorSpec::straight(1),
                   DrivingStyle::kComfortOriented, straight_theta(1, 1, 5), w),
      make_vehicle(1, VehicleRole::kConnected, 2.5, 0, BehaviorSpec::lane_change(0, 1, 5.0),
                   DrivingStyle::kComfortOriented, cav1, w),
      make_vehicle(2, VehicleRole::kConnected, -10.0, 0, BehaviorSpec::straight(0),
                   DrivingStyle::kVelocityConsistent, straight_theta(1, 8, 1.5), w),
      make_vehicle(3, VehicleRole::kConnected, 15.0, 0, BehaviorSpec::straight(0),
                   DrivingStyle::kPoseTracking, straight_theta(8, 1.2, 1), w),
  };
  c.validate();
  return c;
}

ScenarioConfig online_lane_change_config() {
  ScenarioConfig c = offline_lane_change_config();
  c.name = "online_lane_change";
  c.horizon = 61;
  c.stage_boundaries = {0, 12, 24, 36, 48, 60};
  // Spreads the lateral motion over the whole run so that the HV can react
  // within each 1.2 s stage.
  c.transition_length = 55.0;
  c.vehicles[0].style = DrivingStyle::kPoseTracking;
  c.vehicles[0].theta_true.theta =
      normalize_effective(straight_theta(8, 1, 2), BehaviorKind::kStraight);
  c.validate();
  return c;
}

}  // namespace scenario
}  // namespace hypercog
