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

#include "hypercog/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypercog {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

// Offsets of px, py, v, psi inside the state block.
constexpr int kPx = 0;
constexpr int kPy = 1;
constexpr int kV = 2;
constexpr int kPsi = 3;

RowBlock make_block(int rows, int cols) {
  RowBlock block;
  block.A = MatrixXd::Zero(rows, cols);
  block.b = VectorXd::Zero(rows);
  block.tags.resize(rows);
  return block;
}

void check_reference(const PlayerModel& player) {
  if (player.reference.size() < 2) {
    throw std::invalid_argument("player " + std::to_string(player.id) +
                                ": reference must cover at least two points");
  }
}

}  // namespace

VehicleState Strategy::state(int j) const {
  const int o = state_offset(j);
  return {data(o + kPx), data(o + kPy), data(o + kV), data(o + kPsi)};
}

ControlInput Strategy::control(int j) const {
  const int o = control_offset(j);
  return {data(o), data(o + 1)};
}

Vector2d Strategy::position(int j) const {
  const int o = state_offset(j);
  return {data(o + kPx), data(o + kPy)};
}

Strategy Strategy::from_reference(const ReferenceTrajectory& reference) {
  Strategy s;
  s.segment = {reference.first_step, reference.size()};
  s.data = VectorXd::Zero(s.segment.strategy_size());
  for (int j = 1; j < reference.size(); ++j) {
    s.data.segment<4>(state_offset(j)) = reference.states[j].vector();
  }
  return s;
}

Strategy Strategy::from_trajectory(Segment segment, std::span<const VehicleState> states,
                                   std::span<const ControlInput> controls) {
  const int n = segment.num_steps();
  if (static_cast<int>(states.size()) != n + 1 || static_cast<int>(controls.size()) != n) {
    throw std::invalid_argument("trajectory does not match the segment length");
  }
  Strategy s;
  s.segment = segment;
  s.data = VectorXd::Zero(segment.strategy_size());
  for (int j = 0; j < n; ++j) {
    s.data.segment<2>(control_offset(j)) = controls[j].vector();
    s.data.segment<4>(state_offset(j + 1)) = states[j + 1].vector();
  }
  return s;
}

std::array<Vector2d, 4> RectangleFootprint::offsets(const VehicleGeometry& g) {
  const double l = 0.5 * g.extended_length;
  const double w = 0.5 * g.extended_width;
  return {Vector2d(l, w), Vector2d(-l, w), Vector2d(-l, -w), Vector2d(l, -w)};
}

RectangleFootprint RectangleFootprint::at(const VehicleState& pose, const VehicleGeometry& g) {
  const double c = std::cos(pose.psi);
  const double s = std::sin(pose.psi);
  RectangleFootprint out;
  const auto off = offsets(g);
  for (int i = 0; i < 4; ++i) {
    out.vertices[i] = Vector2d(pose.px + c * off[i].x() - s * off[i].y(),
                               pose.py + s * off[i].x() + c * off[i].y());
  }
  return out;
}

KeepOut KeepOut::of(const VehicleGeometry& g) {
  const double d = g.diagonal();
  return {0.5 * g.length + 0.5 * d, 0.5 * g.width + 0.5 * d};
}

double KeepOut::radius(double x, double y) const {
  return std::pow(std::pow(x / a, 6) + std::pow(y / b, 6), 1.0 / 6.0);
}

double KeepOut::value(const VehicleState& pose, const Vector2d& other) const {
  const double c = std::cos(pose.psi);
  const double s = std::sin(pose.psi);
  const double dx = other.x() - pose.px;
  const double dy = other.y() - pose.py;
  const double xb = (c * dx + s * dy) / a;
  const double yb = (-s * dx + c * dy) / b;
  return 1.0 - std::pow(xb, 6) - std::pow(yb, 6);
}

std::string_view to_string(RowKind kind) {
  switch (kind) {
    case RowKind::kDynamics:
      return "dynamics";
    case RowKind::kBox:
      return "box";
    case RowKind::kLane:
      return "lane";
    case RowKind::kCollision:
      return "collision";
    case RowKind::kBehavior:
      return "behavior";
  }
  return "unknown";
}

void RowBlock::append(const RowBlock& other) {
  if (other.rows() == 0) return;
  if (rows() == 0) {
    *this = other;
    return;
  }
  if (A.cols() != other.A.cols()) throw std::invalid_argument("row blocks differ in width");
  MatrixXd a(A.rows() + other.A.rows(), A.cols());
  a << A, other.A;
  VectorXd bb(b.size() + other.b.size());
  bb << b, other.b;
  A = std::move(a);
  b = std::move(bb);
  tags.insert(tags.end(), other.tags.begin(), other.tags.end());
}

double ConstraintSystem::violation(const VectorXd& s) const {
  double v = 0.0;
  if (eq.rows() > 0) v = std::max(v, (eq.A * s - eq.b).lpNorm<Eigen::Infinity>());
  if (in.rows() > 0) v = std::max(v, (in.A * s - in.b).maxCoeff());
  return v;
}

namespace constraints {

RowBlock dynamics_rows(const PlayerModel& player, const RoadModel& road) {
  check_reference(player);
  const Segment seg = player.segment();
  const int n = seg.num_steps();
  RowBlock block = make_block(4 * n, seg.strategy_size());
  for (int j = 0; j < n; ++j) {
    const LinearizedStep step = dynamics::linearize_discrete(
        player.reference.states[j], ControlInput{}, player.geometry, road.ts);
    const int r = 4 * j;
    // x(j+1) - A x(j) - B u(j) = c
    block.A.block<4, 4>(r, Strategy::state_offset(j + 1)) = Mat4::Identity();
    block.A.block<4, 2>(r, Strategy::control_offset(j)) = -step.B;
    if (j == 0) {
      block.b.segment<4>(r) = step.c + step.A * player.initial.vector();
    } else {
      block.A.block<4, 4>(r, Strategy::state_offset(j)) = -step.A;
      block.b.segment<4>(r) = step.c;
    }
    for (int i = 0; i < 4; ++i) block.tags[r + i] = {RowKind::kDynamics, -1, j};
  }
  return block;
}

RowBlock box_rows(const BoxLimits& limits, Segment segment) {
  const int n = segment.num_steps();
  RowBlock block = make_block(6 * n, segment.strategy_size());
  for (int j = 0; j < n; ++j) {
    const int r = 6 * j;
    const int v = Strategy::state_offset(j + 1) + kV;
    const int a = Strategy::control_offset(j);
    const int d = a + 1;
    block.A(r + 0, v) = 1.0;
    block.b(r + 0) = limits.v_max;
    block.A(r + 1, v) = -1.0;
    block.b(r + 1) = -limits.v_min;
    block.A(r + 2, a) = 1.0;
    block.b(r + 2) = limits.a_max;
    block.A(r + 3, a) = -1.0;
    block.b(r + 3) = -limits.a_min;
    block.A(r + 4, d) = 1.0;
    block.b(r + 4) = limits.delta_max;
    block.A(r + 5, d) = -1.0;
    block.b(r + 5) = -limits.delta_min;
    for (int i = 0; i < 6; ++i) block.tags[r + i] = {RowKind::kBox, -1, j};
  }
  return block;
}

RowBlock lane_rows(const PlayerModel& player, const LaneGeometry& lanes) {
  check_reference(player);
  const Segment seg = player.segment();
  const int n = seg.num_steps();
  const auto& behavior = player.behavior;
  int lower = behavior.lane;
  int upper = behavior.lane;
  if (behavior.kind == BehaviorKind::kLaneChange) {
    lower = std::min(behavior.lane, behavior.target_lane);
    upper = std::max(behavior.lane, behavior.target_lane);
  }
  const std::array<std::pair<int, Side>, 2> bounds = {
      std::pair{lower, Side::kLeft}, std::pair{upper + 1, Side::kRight}};
  const auto offsets = RectangleFootprint::offsets(player.geometry);

  RowBlock block = make_block(8 * n, seg.strategy_size());
  int r = 0;
  for (int j = 1; j <= n; ++j) {
    const VehicleState& ref = player.reference.states[j];
    const double c = std::cos(ref.psi);
    const double s = std::sin(ref.psi);
    const int o = Strategy::state_offset(j);
    for (const auto& [boundary, side] : bounds) {
      const LineCoefficients line =
          lanes.tangent_at({CurveKind::kBoundary, boundary}, {ref.px, ref.py}, side);
      for (const auto& off : offsets) {
        const Vector2d vertex(ref.px + c * off.x() - s * off.y(), ref.py + s * off.x() + c * off.y());
        const Vector2d dpsi(-s * off.x() - c * off.y(), c * off.x() - s * off.y());
        const double g_psi = line.a * dpsi.x() + line.b * dpsi.y();
        block.A(r, o + kPx) = line.a;
        block.A(r, o + kPy) = line.b;
        block.A(r, o + kPsi) = g_psi;
        block.b(r) = -line.evaluate(vertex.x(), vertex.y()) + line.a * ref.px + line.b * ref.py +
                     g_psi * ref.psi;
        block.tags[r] = {RowKind::kLane, -1, j};
        ++r;
      }
    }
  }
  return block;
}

RowBlock collision_rows(const PlayerModel& player, int opponent_id, const Strategy& opponent) {
  check_reference(player);
  const Segment seg = player.segment();
  if (!(opponent.segment == seg)) {
    throw std::invalid_argument("player " + std::to_string(player.id) + ": opponent " +
                                std::to_string(opponent_id) + " covers a different segment");
  }
  const int n = seg.num_steps();
  const KeepOut keep = KeepOut::of(player.geometry);
  RowBlock block = make_block(n, seg.strategy_size());
  for (int j = 1; j <= n; ++j) {
    const VehicleState& ref = player.reference.states[j];
    const Vector2d q = opponent.position(j);
    const double c = std::cos(ref.psi);
    const double s = std::sin(ref.psi);
    const double dx = q.x() - ref.px;
    const double dy = q.y() - ref.py;
    const double xb = c * dx + s * dy;
    const double yb = -s * dx + c * dy;
    // 1 - rho with rho the super-ellipse radius; same zero set as the
    // sixth-power form, but its tangent plane supports the keep-out region at
    // any distance instead of shrinking with (separation / 6).
    const double rho = keep.radius(xb, yb);
    const double h = 1.0 - rho;
    const double r5 = std::pow(rho, 5);
    const double hx = -std::pow(xb, 5) / (std::pow(keep.a, 6) * r5);
    const double hy = -std::pow(yb, 5) / (std::pow(keep.b, 6) * r5);
    const double g_px = -hx * c + hy * s;
    const double g_py = -hx * s - hy * c;
    const double g_psi = hx * yb - hy * xb;
    const double norm = std::hypot(g_px, g_py);
    const double scale = norm > 1e-12 ? 1.0 / norm : 1.0;
    const int o = Strategy::state_offset(j);
    const int r = j - 1;
    block.A(r, o + kPx) = scale * g_px;
    block.A(r, o + kPy) = scale * g_py;
    block.A(r, o + kPsi) = scale * g_psi;
    block.b(r) = scale * (g_px * ref.px + g_py * ref.py + g_psi * ref.psi - h);
    block.tags[r] = {RowKind::kCollision, opponent_id, j};
  }
  return block;
}

RowBlock behavior_rows(const PlayerModel& player, const LaneGeometry& lanes) {
  check_reference(player);
  const Segment seg = player.segment();
  const int n = seg.num_steps();
  RowBlock block = make_block(n, seg.strategy_size());
  const auto& behavior = player.behavior;
  for (int j = 1; j <= n; ++j) {
    const int o = Strategy::state_offset(j);
    const int r = j - 1;
    if (behavior.kind == BehaviorKind::kStraight) {
      block.A(r, o + kPsi) = 1.0;
      block.b(r) = std::atan2(behavior.direction.y(), behavior.direction.x());
    } else {
      const VehicleState& ref = player.reference.states[j];
      const Side side = behavior.target_lane > behavior.lane ? Side::kLeft : Side::kRight;
      const LineCoefficients line =
          lanes.tangent_at({CurveKind::kCenterline, behavior.lane}, {ref.px, ref.py}, side);
      block.A(r, o + kPx) = line.a;
      block.A(r, o + kPy) = line.b;
      block.b(r) = -line.c;
    }
    block.tags[r] = {RowKind::kBehavior, -1, j};
  }
  return block;
}

ConstraintSystem assemble_static(const PlayerModel& player, const RoadModel& road) {
  ConstraintSystem sys;
  sys.eq = dynamics_rows(player, road);
  sys.in = box_rows(road.limits, player.segment());
  sys.in.append(lane_rows(player, road.lanes));
  RowBlock behavior = behavior_rows(player, road.lanes);
  if (player.behavior.kind == BehaviorKind::kStraight) {
    sys.eq.append(behavior);
  } else {
    sys.in.append(behavior);
  }
  return sys;
}

ConstraintSystem with_collisions(const ConstraintSystem& static_system, const PlayerModel& player,
                                 std::vector<Opponent> opponents) {
  std::sort(opponents.begin(), opponents.end(),
            [](const Opponent& a, const Opponent& b) { return a.id < b.id; });
  RowBlock collisions;
  for (const auto& op : opponents) {
    if (op.id == player.id) throw std::invalid_argument("a player cannot oppose itself");
    if (op.strategy == nullptr) throw std::invalid_argument("opponent strategy missing");
    collisions.append(collision_rows(player, op.id, *op.strategy));
  }
  if (collisions.rows() == 0) return static_system;

  // Behavior inequalities stay last.
  const auto& tags = static_system.in.tags;
  const auto split = static_cast<int>(
      std::find_if(tags.begin(), tags.end(),
                   [](const RowTag& t) { return t.kind == RowKind::kBehavior; }) -
      tags.begin());
  const int tail = static_system.in.rows() - split;
  const int cols = static_cast<int>(static_system.eq.A.cols());

  ConstraintSystem sys;
  sys.eq = static_system.eq;
  const int total = static_system.in.rows() + collisions.rows();
  sys.in.A.resize(total, cols);
  sys.in.b.resize(total);
  sys.in.A.topRows(split) = static_system.in.A.topRows(split);
  sys.in.b.head(split) = static_system.in.b.head(split);
  sys.in.A.middleRows(split, collisions.rows()) = collisions.A;
  sys.in.b.segment(split, collisions.rows()) = collisions.b;
  sys.in.A.bottomRows(tail) = static_system.in.A.bottomRows(tail);
  sys.in.b.tail(tail) = static_system.in.b.tail(tail);
  sys.in.tags.assign(tags.begin(), tags.begin() + split);
  sys.in.tags.insert(sys.in.tags.end(), collisions.tags.begin(), collisions.tags.end());
  sys.in.tags.insert(sys.in.tags.end(), tags.begin() + split, tags.end());
  return sys;
}

ConstraintSystem assemble(const PlayerModel& player, std::vector<Opponent> opponents,
                          const RoadModel& road) {
  return with_collisions(assemble_static(player, road), player, std::move(opponents));
}

}  // namespace constraints
}  // namespace hypercog
