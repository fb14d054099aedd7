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
// Strategy vectors and the per-player linear constraint system.
//
// A segment covers time points k0 .. k0 + N. Its strategy stacks
//   u(k0), x(k0 + 1), u(k0 + 1), x(k0 + 2), ..., u(k0 + N - 1), x(k0 + N)
// so it has 6 N entries; the initial state x(k0) is data, not a decision.
//
// All nonlinear rows (dynamics, lane vertices, collision keep-out) are
// linearized around the player's reference trajectory, which stays fixed while
// best responses iterate. Opponent positions in collision rows are data.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "hypercog/dynamics.hpp"
#include "hypercog/scenario.hpp"

namespace hypercog {

struct Segment {
  int first_step = 0;  // k0
  int num_points = 2;  // N + 1

  int num_steps() const { return num_points - 1; }
  int strategy_size() const { return 6 * num_steps(); }
  bool operator==(const Segment&) const = default;
};

struct Strategy {
  Segment segment;
  Eigen::VectorXd data;

  // Local indices: states j = 1 .. N, controls j = 0 .. N - 1.
  static int state_offset(int j) { return 6 * (j - 1) + 2; }
  static int control_offset(int j) { return 6 * j; }

  VehicleState state(int j) const;
  ControlInput control(int j) const;
  Eigen::Vector2d position(int j) const;

  // States from the reference (first point dropped), zero controls.
  static Strategy from_reference(const ReferenceTrajectory& reference);
  // `states` holds N + 1 points including x(k0); `controls` holds N inputs.
  static Strategy from_trajectory(Segment segment, std::span<const VehicleState> states,
                                  std::span<const ControlInput> controls);
};

// Extended-footprint vertices A (front-left), B (rear-left), C (rear-right),
// D (front-right), i.e. counterclockwise.
struct RectangleFootprint {
  std::array<Eigen::Vector2d, 4> vertices;

  static RectangleFootprint at(const VehicleState& pose, const VehicleGeometry& geometry);
  // Body-frame offsets (along, across) of the four vertices.
  static std::array<Eigen::Vector2d, 4> offsets(const VehicleGeometry& geometry);
};

// Super-ellipse keep-out semi-axes of a vehicle.
struct KeepOut {
  double a = 0.0;  // longitudinal, L/2 + D/2
  double b = 0.0;  // lateral, W/2 + D/2

  static KeepOut of(const VehicleGeometry& geometry);
  // 1 - (x/a)^6 - (y/b)^6 with the other vehicle at body-frame (x, y) of the
  // pose; positive inside the keep-out region.
  double value(const VehicleState& pose, const Eigen::Vector2d& other) const;
  // ((x/a)^6 + (y/b)^6)^(1/6); the keep-out boundary is radius 1.
  double radius(double x, double y) const;
};

struct RoadModel {
  LaneGeometry lanes{2, 4.0};
  BoxLimits limits;
  double ts = 0.1;
};

// Everything about one vehicle that the constraint assembly needs.
struct PlayerModel {
  int id = 0;
  VehicleGeometry geometry;
  BehaviorSpec behavior;
  VehicleState initial;           // x(k0)
  ReferenceTrajectory reference;  // k0 .. k0 + N

  Segment segment() const { return {reference.first_step, reference.size()}; }
};

enum class RowKind { kDynamics, kBox, kLane, kCollision, kBehavior };

std::string_view to_string(RowKind kind);

struct RowTag {
  RowKind kind = RowKind::kDynamics;
  int opponent = -1;  // collision rows only
  int step = 0;       // local state/control index the row belongs to
  bool operator==(const RowTag&) const = default;
};

struct RowBlock {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<RowTag> tags;

  int rows() const { return static_cast<int>(b.size()); }
  void append(const RowBlock& other);
};

struct ConstraintSystem {
  RowBlock eq;  // A_eq s = b_eq
  RowBlock in;  // A_in s <= b_in

  int num_variables() const { return static_cast<int>(eq.A.cols()); }
  // max(0, max(A_in s - b_in), max|A_eq s - b_eq|).
  double violation(const Eigen::VectorXd& s) const;
};

namespace constraints {

RowBlock dynamics_rows(const PlayerModel& player, const RoadModel& road);
RowBlock box_rows(const BoxLimits& limits, Segment segment);
RowBlock lane_rows(const PlayerModel& player, const LaneGeometry& lanes);
// Throws std::invalid_argument when the segments differ.
RowBlock collision_rows(const PlayerModel& player, int opponent_id, const Strategy& opponent);
// Equalities for straight driving, inequalities for lane changes.
RowBlock behavior_rows(const PlayerModel& player, const LaneGeometry& lanes);

struct Opponent {
  int id = 0;
  const Strategy* strategy = nullptr;
};

// Static part: rows that do not depend on other players.
ConstraintSystem assemble_static(const PlayerModel& player, const RoadModel& road);
// Full system; collision rows are ordered by opponent id regardless of input order.
ConstraintSystem assemble(const PlayerModel& player, std::vector<Opponent> opponents,
                          const RoadModel& road);
// Appends collision rows to a static system.
ConstraintSystem with_collisions(const ConstraintSystem& static_system, const PlayerModel& player,
                                 std::vector<Opponent> opponents);

}  // namespace constraints
}  // namespace hypercog
