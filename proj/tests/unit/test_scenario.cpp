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
#include <string>

#include "hypercog/scenario.hpp"
#include "json.hpp"

using namespace hypercog;

namespace {

// Same keys and strings; numbers equal to a relative 1e-12. Loading
// renormalizes weights and converts degrees, which may move the last bit.
bool same_document(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>();
    const double y = b.get<double>();
    return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x));
  }
  if (a.type() != b.type() || a.size() != b.size()) return false;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key()) || !same_document(it.value(), b.at(it.key()))) return false;
    }
    return true;
  }
  if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!same_document(a[i], b[i])) return false;
    }
    return true;
  }
  return a == b;
}

}  // namespace

TEST_CASE("lane geometry numbering") {
  const LaneGeometry lanes(3, 3.5);
  CHECK(lanes.centerline_y(0) == doctest::Approx(1.75));
  CHECK(lanes.centerline_y(2) == doctest::Approx(8.75));
  CHECK(lanes.boundary_y(3) == doctest::Approx(10.5));
  CHECK_THROWS_AS(lanes.centerline_y(3), std::out_of_range);
  CHECK_THROWS_AS(LaneGeometry(0, 3.5), std::invalid_argument);
}

TEST_CASE("tangent lines are unit and evaluate <= 0 on the permitted side") {
  const LaneGeometry lanes(2, 4.0);
  const Eigen::Vector2d probe(10.0, 2.0);  // inside lane 0
  const LineCoefficients below =
      lanes.tangent_at({CurveKind::kBoundary, 1}, probe, Side::kRight);
  CHECK(std::hypot(below.a, below.b) == doctest::Approx(1.0));
  CHECK(below.evaluate(probe.x(), probe.y()) < 0.0);
  CHECK(below.evaluate(10.0, 6.0) > 0.0);
  CHECK(below.evaluate(10.0, 4.0) == doctest::Approx(0.0));
  const LineCoefficients above = lanes.tangent_at({CurveKind::kBoundary, 0}, probe, Side::kLeft);
  CHECK(above.evaluate(probe.x(), probe.y()) < 0.0);
  CHECK_THROWS_AS(lanes.tangent_at({CurveKind::kBoundary, 0}, {-200.0, 0.0}, Side::kLeft),
                  std::out_of_range);
}

TEST_CASE("typical weights are unit over the effective components and within bounds") {
  for (auto kind : {BehaviorKind::kStraight, BehaviorKind::kLaneChange}) {
    for (auto style : {DrivingStyle::kPoseTracking, DrivingStyle::kVelocityConsistent,
                       DrivingStyle::kComfortOriented}) {
      const StyleWeights w = style_weights_for(kind, style);
      CHECK(effective_part(w.theta, kind).norm() == doctest::Approx(1.0));
      CHECK(w.within_bounds());
      CHECK(parse_driving_style(to_string(style)) == style);
    }
  }
  CHECK(effective_indices(BehaviorKind::kStraight) == std::vector<int>{0, 2, 4});
  CHECK_THROWS_AS(parse_driving_style("aggressive"), std::invalid_argument);
}

TEST_CASE("lane-change reference ends on the target centerline") {
  const LaneGeometry lanes(2, 4.0);
  const BehaviorSpec b = BehaviorSpec::lane_change(0, 1, 5.0);
  const VehicleState x0{0.0, 2.0, 10.0, 0.0};
  const ReferenceTrajectory ref = scenario::build_reference(b, x0, 36, 0.1, lanes, 30.0);
  REQUIRE(ref.size() == 36);
  CHECK(ref.states.front().py == doctest::Approx(2.0));
  CHECK(ref.states.back().py == doctest::Approx(6.0));
  CHECK(ref.states.back().psi == doctest::Approx(0.0));
  for (int k = 1; k < ref.size(); ++k) {
    CHECK(ref.states[k].px - ref.states[k - 1].px == doctest::Approx(1.0));
    CHECK(ref.states[k].py >= ref.states[k - 1].py - 1e-12);
  }
  CHECK_THROWS_AS(scenario::build_reference(b, x0, 20, 0.1, lanes, 30.0), std::invalid_argument);
}

TEST_CASE("straight reference projects onto the centerline") {
  const LaneGeometry lanes(2, 4.0);
  const ReferenceTrajectory ref = scenario::build_reference(
      BehaviorSpec::straight(1), VehicleState{3.0, 5.5, 8.0, 0.1}, 5, 0.1, lanes);
  for (int k = 0; k < ref.size(); ++k) {
    CHECK(ref.states[k].py == 6.0);
    CHECK(ref.states[k].px == doctest::Approx(3.0 + 0.8 * k));
    CHECK(ref.states[k].psi == 0.0);
  }
  CHECK(scenario::nearest_longitudinal_index(ref, 4.5) == 2);
  CHECK(scenario::nearest_longitudinal_index(ref, -10.0) == 0);
  CHECK(scenario::nearest_longitudinal_index(ref, 100.0) == 4);
  const ReferenceTrajectory part = ref.slice(1, 3);
  CHECK(part.first_step == 1);
  CHECK(part.size() == 3);
  CHECK_THROWS_AS(ref.slice(3, 3), std::out_of_range);
}

TEST_CASE("built-in scenarios validate and survive a JSON round trip") {
  for (const ScenarioConfig& c :
       {scenario::offline_lane_change_config(), scenario::online_lane_change_config()}) {
    CHECK_NOTHROW(c.validate());
    CHECK(c.hv().id == 0);
    const std::string text = scenario::dump_config(c);
    const ScenarioConfig back = scenario::load_config(text);
    CHECK(same_document(nlohmann::json::parse(scenario::dump_config(back)),
                        nlohmann::json::parse(text)));
    CHECK(back.vehicles.size() == c.vehicles.size());
    for (std::size_t i = 0; i < c.vehicles.size(); ++i) {
      CHECK((back.vehicles[i].theta_true.theta - c.vehicles[i].theta_true.theta).norm() < 1e-12);
      CHECK(back.vehicles[i].initial.psi == doctest::Approx(c.vehicles[i].initial.psi));
    }
    CHECK(back.stage_boundaries == c.stage_boundaries);
    CHECK(back.inverse.conservative_from_stage == c.inverse.conservative_from_stage);
  }
}

TEST_CASE("validation names the offending field") {
  auto expect = [](ScenarioConfig c, const std::string& field) {
    try {
      c.validate();
      FAIL("expected a validation error for " << field);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  ScenarioConfig c = scenario::offline_lane_change_config();
  c.horizon = 1;
  expect(c, "horizon");
  c = scenario::offline_lane_change_config();
  c.vehicles[1].id = 0;
  expect(c, "vehicles");
  c = scenario::offline_lane_change_config();
  c.stage_boundaries = {0, 10, 9, 35};
  expect(c, "stage_boundaries");
  c = scenario::offline_lane_change_config();
  c.vehicles[0].behavior.lane = 5;
  expect(c, "behavior.lane");
  c = scenario::offline_lane_change_config();
  c.inverse.conservative_from_stage = 0;
  expect(c, "conservative_from_stage");
  c = scenario::offline_lane_change_config();
  c.vehicles[0].role = VehicleRole::kConnected;
  expect(c, "human");
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(scenario::load_config("{"), std::invalid_argument);
  CHECK_THROWS_AS(scenario::load_config("[]"), std::invalid_argument);
  CHECK_THROWS_AS(scenario::load_config(R"({"vehicles": [{"id": 0}]})"), std::invalid_argument);
  CHECK_THROWS_AS(scenario::load_config(
                      R"({"vehicles": [{"id": 0, "role": "human", "initial": {"py": 6},
                          "behavior": {"kind": "straight", "lane": 1}, "style": "bold"}]})"),
                  std::invalid_argument);
  const ScenarioConfig one = scenario::load_config(
      R"({"vehicles": [{"id": 0, "role": "human", "initial": {"py": 6},
          "behavior": {"kind": "straight", "lane": 1}, "theta": [2, 1, 2, 1, 1, 1]}]})");
  CHECK(effective_part(one.hv().theta_true.theta, BehaviorKind::kStraight).norm() ==
        doctest::Approx(1.0));
  CHECK(one.hv().theta_true.theta(0) == doctest::Approx(2.0 / 3.0));
}
