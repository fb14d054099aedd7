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

///////////////////////////////////////////////////////////////////////////////
//
// Road geometry, driving-style weights, reference trajectories and the
// scenario configuration document.
//
// Lanes are numbered from the bottom (smallest y) starting at 0. Lane l spans
// y in [l * w, (l + 1) * w]; boundary j lies at y = j * w and the centerline of
// lane l at y = (l + 0.5) * w. Vehicles travel towards +x.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypercog/dynamics.hpp"
#include "hypercog/qp.hpp"

namespace hypercog {

// a x + b y + c = 0 with a^2 + b^2 = 1.
struct LineCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double evaluate(double x, double y) const { return a * x + b * y + c; }
};

// Side of a curve (relative to its direction of increasing parameter) on which
// the permitted region lies.
enum class Side { kLeft, kRight };

// Polyline in the plane, parameterized by arc length.
class PlanarCurve {
 public:
  explicit PlanarCurve(std::vector<Eigen::Vector2d> points);

  // Tangent line at the projection of `point`, oriented so that the permitted
  // side satisfies a x + b y + c <= 0. Throws std::out_of_range when the
  // projection falls outside the curve's parameter range.
  LineCoefficients tangent_at(const Eigen::Vector2d& point, Side permitted) const;

  const std::vector<Eigen::Vector2d>& points() const { return points_; }

 private:
  std::vector<Eigen::Vector2d> points_;
};

enum class CurveKind { kBoundary, kCenterline };

struct CurveId {
  CurveKind kind = CurveKind::kBoundary;
  int index = 0;
};

class LaneGeometry {
 public:
  LaneGeometry(int lane_count, double lane_width, double x_min = -100.0, double x_max = 1000.0);

  int lane_count() const { return lane_count_; }
  double lane_width() const { return lane_width_; }
  double centerline_y(int lane) const;
  double boundary_y(int boundary) const;

  const PlanarCurve& curve(CurveId id) const;
  LineCoefficients tangent_at(CurveId id, const Eigen::Vector2d& point, Side permitted) const;

 private:
  int lane_count_;
  double lane_width_;
  std::vector<PlanarCurve> boundaries_;
  std::vector<PlanarCurve> centerlines_;
};

enum class BehaviorKind { kStraight, kLaneChange };

struct BehaviorSpec {
  BehaviorKind kind = BehaviorKind::kStraight;
  // Lane the vehicle drives in (straight) or leaves (lane change).
  int lane = 0;
  // Lane change only.
  int target_lane = 0;
  double start_x = 0.0;
  // Straight only: unit vector along the centerline.
  Eigen::Vector2d direction{1.0, 0.0};

  static BehaviorSpec straight(int lane, Eigen::Vector2d direction = {1.0, 0.0});
  static BehaviorSpec lane_change(int source_lane, int target_lane, double start_x);
};

enum class DrivingStyle { kPoseTracking, kVelocityConsistent, kComfortOriented };

std::string_view to_string(DrivingStyle style);
DrivingStyle parse_driving_style(std::string_view text);
std::string_view to_string(BehaviorKind kind);

using Theta = Eigen::Matrix<double, 6, 1>;

struct ThetaBounds {
  double min = 1e-3;
  double max = 10.0;
};

// Indices of theta components: px, py, v, psi, a, delta.
enum ThetaIndex : int { kThetaPx = 0, kThetaPy, kThetaV, kThetaPsi, kThetaA, kThetaDelta };

// Components that shape the optimum for a behavior: (px, v, a) for straight
// driving, all six for lane changes.
std::vector<int> effective_indices(BehaviorKind kind);
Eigen::VectorXd effective_part(const Theta& theta, BehaviorKind kind);
// theta / ||theta_eff||_2.
Theta normalize_effective(const Theta& theta, BehaviorKind kind);

struct StyleWeights {
  Theta theta = Theta::Ones();
  ThetaBounds bounds;

  bool within_bounds() const;
};

// Typical weights for a behavior/style pair, normalized over the effective
// components. Non-effective components of straight driving carry ratio 1.
StyleWeights style_weights_for(BehaviorKind behavior, DrivingStyle style,
                               ThetaBounds bounds = {});

struct ReferenceTrajectory {
  // Global index of states.front().
  int first_step = 0;
  std::vector<VehicleState> states;

  int size() const { return static_cast<int>(states.size()); }
  // Sub-trajectory of `count` points starting at local index `offset`.
  ReferenceTrajectory slice(int offset, int count) const;
};

struct BoxLimits {
  double v_min = 0.0;
  double v_max = 20.0;
  double a_min = -8.0;
  double a_max = 2.0;
  double delta_min = -33.0 * 3.14159265358979323846 / 180.0;
  double delta_max = 33.0 * 3.14159265358979323846 / 180.0;
};

namespace scenario {

// Constant-speed centerline tracking; lane changes follow a quintic lateral
// profile in p_x that starts at behavior.start_x. Throws std::invalid_argument
// when the lane change would not finish within the horizon.
ReferenceTrajectory build_reference(const BehaviorSpec& behavior, const VehicleState& initial,
                                    int horizon, double ts, const LaneGeometry& lanes,
                                    double transition_length = 30.0);

// Index of the reference point whose p_x is nearest to `px`.
int nearest_longitudinal_index(const ReferenceTrajectory& reference, double px);

}  // namespace scenario

enum class VehicleRole { kHuman, kConnected };

struct VehicleConfig {
  int id = 0;
  VehicleRole role = VehicleRole::kConnected;
  VehicleGeometry geometry;
  VehicleState initial;
  BehaviorSpec behavior;
  DrivingStyle style = DrivingStyle::kComfortOriented;
  StyleWeights theta_true;
};

struct NoiseSettings {
  double std = 0.05;  // m, on p_x of observed positions
  std::uint64_t seed = 1;
};

struct InverseConfig {
  double kappa_offline = 1.5;
  double kappa_online = 0.3;
  double omega_dist = 1.0;
  // Online runs add the conservativeness term when learning from this stage
  // (1-based) onward.
  int conservative_from_stage = 3;
};

struct ScenarioConfig {
  std::string name = "scenario";
  int horizon = 36;  // number of time points, initial state included
  double ts = 0.1;
  double transition_length = 30.0;
  std::vector<int> stage_boundaries;  // time-point indices, 0 .. horizon - 1
  int lane_count = 2;
  double lane_width = 4.0;
  BoxLimits limits;
  ThetaBounds theta_bounds;
  std::vector<VehicleConfig> vehicles;
  NoiseSettings noise;
  SolverSettings solver;
  InverseConfig inverse;

  const VehicleConfig& hv() const;
  const VehicleConfig& vehicle(int id) const;
  LaneGeometry lane_geometry() const;
  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

namespace scenario {

// Parses a JSON configuration document. Lengths are meters, angles degrees.
ScenarioConfig load_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);
std::string dump_config(const ScenarioConfig& config);

// Built-in scenarios: one HV in the upper lane, three CAVs in the lower lane,
// CAV 1 changing lanes towards the HV.
ScenarioConfig offline_lane_change_config();
ScenarioConfig online_lane_change_config();

}  // namespace scenario
}  // namespace hypercog
