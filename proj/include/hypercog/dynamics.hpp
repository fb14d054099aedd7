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
// Kinematic bicycle model. State is (p_x, p_y, v, psi), control is
// (a, delta). Discretization is forward Euler; linearization is a first-order
// Taylor expansion of the Euler step around a nominal state/control pair.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace hypercog {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;

struct VehicleState {
  double px = 0.0;   // m
  double py = 0.0;   // m
  double v = 0.0;    // m/s
  double psi = 0.0;  // rad

  Vec4 vector() const { return {px, py, v, psi}; }
  static VehicleState from_vector(const Vec4& x) { return {x(0), x(1), x(2), x(3)}; }
};

struct ControlInput {
  double a = 0.0;      // m/s^2
  double delta = 0.0;  // rad

  Eigen::Vector2d vector() const { return {a, delta}; }
};

// Plain-view rectangle of a vehicle plus the slightly larger rectangle used by
// the lane constraints. The diagonal is derived, not configured.
struct VehicleGeometry {
  double length = 3.63;
  double width = 1.85;
  double extended_length = 3.73;
  double extended_width = 1.95;

  double diagonal() const;
  // Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

struct LinearizedStep {
  Mat4 A = Mat4::Identity();
  Mat42 B = Mat42::Zero();
  Vec4 c = Vec4::Zero();

  Vec4 apply(const Vec4& x, const Eigen::Vector2d& u) const { return A * x + B * u + c; }
};

namespace dynamics {

// Time derivative (v cos psi, v sin psi, a, v tan delta / L).
// Throws std::domain_error when |delta| >= pi/2.
Vec4 continuous_rhs(const VehicleState& state, const ControlInput& control,
                    const VehicleGeometry& geometry);

// Analytic Jacobians of continuous_rhs.
Mat4 state_jacobian(const VehicleState& state, const ControlInput& control,
                    const VehicleGeometry& geometry);
Mat42 control_jacobian(const VehicleState& state, const ControlInput& control,
                       const VehicleGeometry& geometry);

// x(k+1) = A x(k) + B u(k) + c, exact at the nominal point.
LinearizedStep linearize_discrete(const VehicleState& nominal_state,
                                  const ControlInput& nominal_control,
                                  const VehicleGeometry& geometry, double ts);

VehicleState euler_step(const VehicleState& state, const ControlInput& control,
                        const VehicleGeometry& geometry, double ts);

// Returns controls.size() + 1 states; the first one is `initial`.
std::vector<VehicleState> rollout(const VehicleState& initial,
                                  std::span<const ControlInput> controls,
                                  const VehicleGeometry& geometry, double ts);

}  // namespace dynamics
}  // namespace hypercog
