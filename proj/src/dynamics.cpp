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

#include "hypercog/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hypercog {

double VehicleGeometry::diagonal() const { return std::hypot(length, width); }

void VehicleGeometry::validate() const {
  if (!(length > 0.0) || !(width > 0.0)) {
    throw std::invalid_argument("vehicle length and width must be positive");
  }
  if (!(extended_length > length)) {
    throw std::invalid_argument("extended_length must exceed length");
  }
  if (!(extended_width > width)) {
    throw std::invalid_argument("extended_width must exceed width");
  }
}

namespace dynamics {
namespace {

void check_steering(double delta) {
  if (!std::isfinite(delta) || std::abs(delta) >= std::numbers::pi / 2.0) {
    throw std::domain_error("steering angle must satisfy |delta| < pi/2, got " +
                            std::to_string(delta));
  }
}

void check_length(const VehicleGeometry& geometry) {
  if (!(geometry.length > 0.0)) throw std::invalid_argument("vehicle length must be positive");
}

}  // namespace

Vec4 continuous_rhs(const VehicleState& state, const ControlInput& control,
                    const VehicleGeometry& geometry) {
  check_length(geometry);
  check_steering(control.delta);
  return {state.v * std::cos(state.psi), state.v * std::sin(state.psi), control.a,
          state.v * std::tan(control.delta) / geometry.length};
}

Mat4 state_jacobian(const VehicleState& state, const ControlInput& control,
                    const VehicleGeometry& geometry) {
  check_length(geometry);
  check_steering(control.delta);
  const double c = std::cos(state.psi);
  const double s = std::sin(state.psi);
  Mat4 J = Mat4::Zero();
  J(0, 2) = c;
  J(0, 3) = -state.v * s;
  J(1, 2) = s;
  J(1, 3) = state.v * c;
  J(3, 2) = std::tan(control.delta) / geometry.length;
  return J;
}

Mat42 control_jacobian(const VehicleState& state, const ControlInput& control,
                       const VehicleGeometry& geometry) {
  check_length(geometry);
  check_steering(control.delta);
  const double cd = std::cos(control.delta);
  Mat42 J = Mat42::Zero();
  J(2, 0) = 1.0;
  J(3, 1) = state.v / (geometry.length * cd * cd);
  return J;
}

LinearizedStep linearize_discrete(const VehicleState& nominal_state,
                                  const ControlInput& nominal_control,
                                  const VehicleGeometry& geometry, double ts) {
  if (!(ts > 0.0)) throw std::invalid_argument("sampling period must be positive");
  const Vec4 f = continuous_rhs(nominal_state, nominal_control, geometry);
  const Mat4 fx = state_jacobian(nominal_state, nominal_control, geometry);
  const Mat42 fu = control_jacobian(nominal_state, nominal_control, geometry);

  LinearizedStep step;
  step.A = Mat4::Identity() + ts * fx;
  step.B = ts * fu;
  step.c = ts * f - ts * fx * nominal_state.vector() - ts * fu * nominal_control.vector();
  return step;
}

VehicleState euler_step(const VehicleState& state, const ControlInput& control,
                        const VehicleGeometry& geometry, double ts) {
  if (!(ts > 0.0)) throw std::invalid_argument("sampling period must be positive");
  return VehicleState::from_vector(state.vector() +
                                   ts * continuous_rhs(state, control, geometry));
}

std::vector<VehicleState> rollout(const VehicleState& initial,
                                  std::span<const ControlInput> controls,
                                  const VehicleGeometry& geometry, double ts) {
  if (!(ts > 0.0)) throw std::invalid_argument("sampling period must be positive");
  std::vector<VehicleState> states;
  states.reserve(controls.size() + 1);
  states.push_back(initial);
  for (const auto& u : controls) states.push_back(euler_step(states.back(), u, geometry, ts));
  return states;
}

}  // namespace dynamics
}  // namespace hypercog
