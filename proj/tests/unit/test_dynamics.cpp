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


#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypercog/dynamics.hpp"
#include "oracles.hpp"

using namespace hypercog;

namespace {

Eigen::VectorXd stack(const VehicleState& x, const ControlInput& u) {
  Eigen::VectorXd z(6);
  z << x.vector(), u.vector();
  return z;
}

}  // namespace

TEST_CASE("continuous Jacobians match central differences") {
  Rng rng(11);
  const VehicleGeometry geom;
  for (int i = 0; i < 50; ++i) {
    const auto [x0, u0] = oracle::random_nominal(rng);
    const auto rhs = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
      return dynamics::continuous_rhs(VehicleState::from_vector(z.head<4>()),
                                      ControlInput{z(4), z(5)}, geom);
    };
    const Eigen::MatrixXd J = oracle::central_jacobian(rhs, stack(x0, u0));
    CHECK((J.leftCols(4) - dynamics::state_jacobian(x0, u0, geom)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((J.rightCols(2) - dynamics::control_jacobian(x0, u0, geom)).cwiseAbs().maxCoeff() <
          1e-6);
  }
}

TEST_CASE("discrete linearization is exact at the nominal point") {
  Rng rng(12);
  const VehicleGeometry geom;
  for (int i = 0; i < 50; ++i) {
    const auto [x0, u0] = oracle::random_nominal(rng);
    const LinearizedStep lin = dynamics::linearize_discrete(x0, u0, geom, 0.1);
    const Vec4 exact = dynamics::euler_step(x0, u0, geom, 0.1).vector();
    CHECK((lin.apply(x0.vector(), u0.vector()) - exact).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("linearization error is second order in the perturbation") {
  Rng rng(13);
  const VehicleGeometry geom;
  const auto [x0, u0] = oracle::random_nominal(rng);
  const LinearizedStep lin = dynamics::linearize_discrete(x0, u0, geom, 0.1);
  Eigen::VectorXd dir(6);
  for (int i = 0; i < 6; ++i) dir(i) = rng.normal();
  double previous = 0.0;
  for (double h : {1e-1, 1e-2, 1e-3}) {
    const Eigen::VectorXd z = stack(x0, u0) + h * dir;
    const VehicleState x = VehicleState::from_vector(z.head<4>());
    const ControlInput u{z(4), z(5)};
    const double err =
        (lin.apply(x.vector(), u.vector()) - dynamics::euler_step(x, u, geom, 0.1).vector())
            .norm();
    if (previous > 0.0) CHECK(err < previous * 0.02);
    previous = err;
  }
}

TEST_CASE("straight driving at constant speed") {
  const VehicleGeometry geom;
  const VehicleState x0{0.0, 2.0, 10.0, 0.0};
  const std::vector<ControlInput> u(5, ControlInput{0.0, 0.0});
  const auto states = dynamics::rollout(x0, u, geom, 0.1);
  REQUIRE(states.size() == 6);
  CHECK(states.front().px == 0.0);
  for (std::size_t k = 0; k < states.size(); ++k) {
    CHECK(states[k].px == doctest::Approx(1.0 * static_cast<double>(k)));
    CHECK(states[k].py == 2.0);
    CHECK(states[k].v == 10.0);
    CHECK(states[k].psi == 0.0);
  }
}

TEST_CASE("rollout applies one Euler step per control") {
  Rng rng(14);
  const VehicleGeometry geom;
  const auto [x0, u0] = oracle::random_nominal(rng);
  const std::vector<ControlInput> u{u0, ControlInput{0.5, -0.1}, ControlInput{-1.0, 0.2}};
  const auto states = dynamics::rollout(x0, u, geom, 0.05);
  REQUIRE(states.size() == 4);
  VehicleState x = x0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    x = dynamics::euler_step(x, u[k], geom, 0.05);
    CHECK((states[k + 1].vector() - x.vector()).norm() == 0.0);
  }
}

TEST_CASE("steering at pi/2 is rejected") {
  const VehicleGeometry geom;
  const VehicleState x{0.0, 0.0, 5.0, 0.0};
  CHECK_THROWS_AS(dynamics::continuous_rhs(x, ControlInput{0.0, M_PI / 2}, geom),
                  std::domain_error);
  CHECK_THROWS_AS(dynamics::linearize_discrete(x, ControlInput{0.0, -2.0}, geom, 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(dynamics::euler_step(x, ControlInput{}, geom, 0.0), std::invalid_argument);
}

TEST_CASE("geometry invariants") {
  VehicleGeometry g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.diagonal() == doctest::Approx(std::hypot(g.length, g.width)));
  g.extended_length = g.length;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = VehicleGeometry{};
  g.extended_width = g.width - 0.1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = VehicleGeometry{};
  g.length = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
