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

#include "hypercog/inverse.hpp"

using namespace hypercog;

namespace {

struct Fixture {
  ScenarioConfig config = scenario::offline_lane_change_config();
  SegmentSetup setup = cognition::full_horizon(config);
  // The HV's own equilibrium strategy: what it actually drives.
  Strategy truth = game::solve_games(
                       cognition::hv_subjective_game(setup, config, config.hv().theta_true),
                       config.solver)
                       .strategy(0);
  InverseSettings settings() const {
    InverseSettings s;
    s.kappa = config.inverse.kappa_offline;
    s.bounds = config.theta_bounds;
    return s;
  }
  Observation exact() const {
    Observation o;
    o.s_hat = truth;
    return o;
  }
  BehaviorKind kind() const { return config.hv().behavior.kind; }
};

}  // namespace

TEST_CASE("parameter error basics") {
  const BehaviorKind k = BehaviorKind::kStraight;
  Theta a = Theta::Ones();
  CHECK(inverse::parameter_error(a, a, k) == 0.0);
  CHECK(inverse::parameter_error(3.0 * a, a, k) == doctest::Approx(0.0));
  // Non-effective components of straight driving do not count.
  Theta b = a;
  b(kThetaPy) = 7.0;
  CHECK(inverse::parameter_error(b, a, k) == doctest::Approx(0.0));
  Theta x = Theta::Constant(1e-9);
  Theta y = x;
  x(kThetaPx) = 1.0;
  y(kThetaV) = 1.0;
  CHECK(inverse::parameter_error(x, y, k) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("noise-free round trip recovers the weights") {
  const Fixture f;
  const InverseResult r =
      inverse::interpret_offline(f.exact(), f.setup, f.config, f.settings(), f.config.solver);
  CHECK_FALSE(r.low_identifiability);
  CHECK(inverse::parameter_error(r.theta_0C.theta, f.config.hv().theta_true.theta, f.kind()) <=
        0.05);
  CHECK(effective_part(r.theta_0C.theta, f.kind()).norm() == doctest::Approx(1.0));
  CHECK(effective_part(r.theta_raw, f.kind()).sum() == doctest::Approx(1.0));
  // Re-predicting with the estimate lands on the observed trajectory.
  const CognitionModel m = cognition::predict_hv(f.setup, f.config, r.theta_0C, f.config.solver);
  double worst = 0.0;
  for (int j = 1; j <= f.truth.segment.num_steps(); ++j) {
    worst = std::max(worst, (m.s_0C.position(j) - f.truth.position(j)).norm());
  }
  CHECK(worst <= 0.02);
}

TEST_CASE("multipliers vanish on inactive rows") {
  const Fixture f;
  const InverseResult r =
      inverse::interpret_offline(f.exact(), f.setup, f.config, f.settings(), f.config.solver);
  REQUIRE(r.lambda.size() == static_cast<Eigen::Index>(r.rows.size()));
  int active = 0;
  for (std::size_t j = 0; j < r.rows.size(); ++j) {
    CHECK(r.lambda(j) >= 0.0);
    if (!r.rows[j].active) CHECK(r.lambda(j) == 0.0);
    if (r.rows[j].active) ++active;
    CHECK(r.rows[j].active == (r.rows[j].value + f.settings().kappa >= 0.0));
  }
  CHECK(active == r.num_active);
}

TEST_CASE("online fit without conservativeness matches the offline fit") {
  const Fixture f;
  const InverseSettings s = f.settings();
  const StyleWeights anchor = style_weights_for(f.kind(), f.config.hv().style, s.bounds);
  const InverseResult off =
      inverse::interpret_offline(f.exact(), f.setup, f.config, s, f.config.solver);
  const InverseResult on_free = inverse::interpret_online(f.exact(), anchor, f.setup, f.config, s,
                                                          f.config.solver, false);
  CHECK((off.theta_0C.theta - on_free.theta_0C.theta).norm() == 0.0);
  InverseSettings zero = s;
  zero.omega_dist = 0.0;
  const InverseResult on_zero = inverse::interpret_online(f.exact(), anchor, f.setup, f.config,
                                                          zero, f.config.solver, true);
  CHECK((off.theta_0C.theta - on_zero.theta_0C.theta).norm() == 0.0);
}

TEST_CASE("a dominant conservativeness term keeps the previous estimate") {
  const Fixture f;
  InverseSettings s = f.settings();
  s.omega_dist = 1e9;
  StyleWeights previous = f.config.hv().theta_true;
  previous.theta(kThetaV) *= 3.0;
  previous.theta = normalize_effective(previous.theta, f.kind());
  const InverseResult r = inverse::interpret_online(f.exact(), previous, f.setup, f.config, s,
                                                    f.config.solver, true);
  CHECK(inverse::parameter_error(r.theta_0C.theta, previous.theta, f.kind()) < 1e-4);
  // With a moderate weight the estimate moves towards the data.
  s.omega_dist = 1e-3;
  const InverseResult free = inverse::interpret_online(f.exact(), previous, f.setup, f.config, s,
                                                       f.config.solver, true);
  CHECK(inverse::parameter_error(free.theta_0C.theta, f.config.hv().theta_true.theta, f.kind()) <
        inverse::parameter_error(previous.theta, f.config.hv().theta_true.theta, f.kind()));
}

TEST_CASE("an HV that stays on its reference is not identifiable") {
  const Fixture f;
  Observation o;
  o.s_hat = Strategy::from_reference(f.setup.model(0).reference);
  const InverseResult r =
      inverse::interpret_offline(o, f.setup, f.config, f.settings(), f.config.solver);
  CHECK(r.low_identifiability);
  CHECK(r.sigma_min < f.settings().identifiability_threshold);
  CHECK_FALSE(r.warnings.empty());
  const Theta anchor = style_weights_for(f.kind(), f.config.hv().style, f.settings().bounds).theta;
  CHECK((r.theta_0C.theta - normalize_effective(anchor, f.kind())).norm() < 1e-12);
}

TEST_CASE("projected coefficients ignore the equality directions") {
  const Fixture f;
  const PlayerModel& hv = f.setup.model(0);
  const ConstraintSystem sys = constraints::assemble_static(hv, f.setup.road);
  const EqualityReduction red(sys.eq.A, sys.eq.b);
  const Eigen::MatrixXd C = inverse::theta_coefficients(hv, f.truth, red.null_basis());
  CHECK(C.cols() == static_cast<Eigen::Index>(effective_indices(f.kind()).size()));
  CHECK(C.rows() == red.null_basis().cols());
  CHECK(C.norm() > 0.0);
  Strategy wrong = f.truth;
  wrong.segment.num_points += 1;
  CHECK_THROWS_AS(inverse::theta_coefficients(hv, wrong, red.null_basis()),
                  std::invalid_argument);
}

TEST_CASE("settings validation") {
  InverseSettings s;
  CHECK_NOTHROW(s.validate());
  s.kappa = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.omega_dist = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.bounds.min = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
