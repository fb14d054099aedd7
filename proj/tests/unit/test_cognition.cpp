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

#include "hypercog/cognition.hpp"

using namespace hypercog;

namespace {

// Every CAV's true weights replaced by its style-typical weights.
ScenarioConfig without_misperception() {
  ScenarioConfig c = scenario::offline_lane_change_config();
  const CognitionProfile prof = CognitionProfile::of(c);
  for (auto& v : c.vehicles) {
    if (v.role == VehicleRole::kConnected) v.theta_true = prof.typical(v.id);
  }
  return c;
}

}  // namespace

TEST_CASE("cognitive threshold of the built-in scenario") {
  const ScenarioConfig c = scenario::offline_lane_change_config();
  const CognitionProfile p = CognitionProfile::of(c);
  CHECK(p.cav_ids == std::vector<int>{1, 2, 3});
  double worst = 0.0;
  for (int id : p.cav_ids) {
    const auto& v = c.vehicle(id);
    const Eigen::VectorXd diff = effective_part(v.theta_true.theta, v.behavior.kind) -
                      effective_part(p.typical(id).theta, v.behavior.kind);
    worst = std::max(worst, diff.norm());
    CHECK(effective_part(p.typical(id).theta, v.behavior.kind).norm() == doctest::Approx(1.0));
  }
  CHECK(p.cognitive_threshold == doctest::Approx(worst));
  CHECK(p.cognitive_threshold > 0.0);
  CHECK(CognitionProfile::of(without_misperception()).cognitive_threshold == 0.0);
}

TEST_CASE("random cognition draws sit at the requested angle") {
  const ScenarioConfig c = scenario::offline_lane_change_config();
  const auto& hv = c.hv();
  const Eigen::VectorXd truth = effective_part(hv.theta_true.theta, hv.behavior.kind).normalized();
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const double angle = rng.uniform(-0.7, 0.7);
    const StyleWeights w = cognition::random_cognition(c, angle, rng);
    const Eigen::VectorXd e = effective_part(w.theta, hv.behavior.kind);
    CHECK(e.norm() == doctest::Approx(1.0));
    CHECK(std::acos(std::clamp(e.dot(truth), -1.0, 1.0)) ==
          doctest::Approx(std::abs(angle)).epsilon(1e-9));
    CHECK(e.minCoeff() >= c.theta_bounds.min);
  }
  const StyleWeights same = cognition::random_cognition(c, 0.0, rng);
  CHECK((same.theta - hv.theta_true.theta).norm() < 1e-12);
}

TEST_CASE("game instances carry the weights of their viewpoint") {
  const ScenarioConfig c = scenario::offline_lane_change_config();
  const SegmentSetup setup = cognition::full_horizon(c);
  const CognitionProfile prof = CognitionProfile::of(c);
  StyleWeights guess = c.hv().theta_true;
  guess.theta(kThetaV) *= 2.0;

  const GameSpec truth = cognition::true_game(setup, c);
  const GameSpec hv = cognition::hv_subjective_game(setup, c, c.hv().theta_true);
  const GameSpec model = cognition::cav_perceived_hv_game(setup, c, guess);
  const GameSpec level1 = cognition::cav_level1_game(setup, c, guess);
  for (int id : prof.cav_ids) {
    CHECK(truth.player(id).weights.theta == c.vehicle(id).theta_true.theta);
    CHECK(hv.player(id).weights.theta == prof.typical(id).theta);
    CHECK(model.player(id).weights.theta == prof.typical(id).theta);
    CHECK(level1.player(id).weights.theta == c.vehicle(id).theta_true.theta);
  }
  CHECK(hv.player(0).weights.theta == c.hv().theta_true.theta);
  CHECK(model.player(0).weights.theta == guess.theta);
  CHECK(level1.player(0).weights.theta == guess.theta);

  const Strategy fixed = Strategy::from_reference(setup.model(0).reference);
  const GameSpec plan = cognition::cav_only_game(setup, c, fixed, false);
  CHECK_FALSE(plan.player(0).decides);
  CHECK(plan.decision_ids() == std::vector<int>{1, 2, 3});
}

TEST_CASE("without misperception the true equilibrium is a hyper Nash equilibrium") {
  const ScenarioConfig c = without_misperception();
  const SegmentSetup setup = cognition::full_horizon(c);
  const EquilibriumResult eq = game::solve_games(cognition::true_game(setup, c), c.solver);
  REQUIRE(eq.converged);
  const HneVerdict v = cognition::verify_hne(setup, c, eq.strategies, 1e-4, c.solver);
  CHECK(v.hv_gap <= 1e-4);
  CHECK(v.hv_ok);
  CHECK(v.holds);
  CHECK(v.failing.empty());
  CHECK_THROWS_AS(cognition::verify_hne(setup, c, eq.strategies, 0.0, c.solver),
                  std::invalid_argument);
}

TEST_CASE("prediction and planning pipeline") {
  const ScenarioConfig c = scenario::offline_lane_change_config();
  const SegmentSetup setup = cognition::full_horizon(c);
  const CognitionModel m = cognition::predict_hv(setup, c, c.hv().theta_true, c.solver);
  CHECK(m.equilibrium.converged);
  // With the true weights the prediction is the HV's own equilibrium.
  const EquilibriumResult hv = game::solve_games(
      cognition::hv_subjective_game(setup, c, c.hv().theta_true), c.solver);
  CHECK((m.s_0C.data - hv.strategy(0).data).norm() == 0.0);
  const CavPlan plan = cognition::plan_cavs(setup, c, m.s_0C, c.solver);
  CHECK(plan.ok());
  CHECK((plan.equilibrium.strategy(0).data - m.s_0C.data).norm() == 0.0);
}

TEST_CASE("stage setups start at the nearest reference point") {
  const ScenarioConfig c = scenario::online_lane_change_config();
  const auto full = cognition::full_references(c, 10);
  REQUIRE(full.size() == c.vehicles.size());
  CHECK(full.front().size() == c.horizon + 10);
  std::vector<VehicleState> initial;
  for (const auto& ref : full) initial.push_back(ref.states[12]);
  initial[0].px += 0.3;
  const SegmentSetup s = cognition::stage(c, full, 12, 13, initial);
  CHECK(s.segment() == Segment{12, 13});
  for (const auto& m : s.models) {
    CHECK(m.reference.size() == 13);
    CHECK(m.reference.first_step == 12);
  }
  CHECK(s.model(0).initial.px == initial[0].px);
  CHECK(s.model(1).reference.states.front().px == full[1].states[12].px);
}

TEST_CASE("probe gap grows with the cognitive threshold") {
  const ScenarioConfig c = scenario::offline_lane_change_config();
  const ProbeResult r = cognition::misperception_gap_probe(c, {0.0, 0.5, 1.0}, c.solver);
  REQUIRE(r.rows.size() == 3);
  double at_zero = -1.0;
  for (const auto& row : r.rows) {
    CHECK(row.converged);
    if (row.cognitive_threshold == 0.0) at_zero = row.hv_gap;
  }
  CHECK(at_zero >= 0.0);
  CHECK(at_zero <= 1e-4);
  CHECK(r.monotone);
  CHECK(r.slope > 0.0);
  CHECK(std::isfinite(r.slope));
}
