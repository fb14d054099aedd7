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

#include "hypercog/cognition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypercog {

Segment SegmentSetup::segment() const {
  if (models.empty()) throw std::invalid_argument("segment setup has no vehicles");
  return models.front().segment();
}

const PlayerModel& SegmentSetup::model(int id) const {
  for (const auto& m : models) {
    if (m.id == id) return m;
  }
  throw std::out_of_range("segment setup has no vehicle " + std::to_string(id));
}

CognitionProfile CognitionProfile::of(const ScenarioConfig& config) {
  CognitionProfile out;
  for (const auto& v : config.vehicles) {
    if (v.role != VehicleRole::kConnected) continue;
    const StyleWeights ave = style_weights_for(v.behavior.kind, v.style, config.theta_bounds);
    out.cav_ids.push_back(v.id);
    out.theta_ave.push_back(ave);
    const double gap = (effective_part(v.theta_true.theta, v.behavior.kind) -
                        effective_part(ave.theta, v.behavior.kind))
                           .norm();
    out.cognitive_threshold = std::max(out.cognitive_threshold, gap);
  }
  return out;
}

const StyleWeights& CognitionProfile::typical(int id) const {
  for (std::size_t i = 0; i < cav_ids.size(); ++i) {
    if (cav_ids[i] == id) return theta_ave[i];
  }
  throw std::out_of_range("no typical weights for vehicle " + std::to_string(id));
}

namespace cognition {

namespace {

std::vector<const VehicleConfig*> sorted_vehicles(const ScenarioConfig& config) {
  std::vector<const VehicleConfig*> out;
  for (const auto& v : config.vehicles) out.push_back(&v);
  std::sort(out.begin(), out.end(),
            [](const VehicleConfig* a, const VehicleConfig* b) { return a->id < b->id; });
  return out;
}

StyleWeights true_weights(const ScenarioConfig& config, int id) {
  StyleWeights w = config.vehicle(id).theta_true;
  w.bounds = config.theta_bounds;
  return w;
}

StyleWeights typical_weights(const ScenarioConfig& config, int id) {
  const VehicleConfig& v = config.vehicle(id);
  return style_weights_for(v.behavior.kind, v.style, config.theta_bounds);
}

// HV with `theta_0`, CAVs at their typical weights.
std::vector<StyleWeights> hv_view_weights(const SegmentSetup& setup, const ScenarioConfig& config,
                                          const StyleWeights& theta_0) {
  std::vector<StyleWeights> w;
  for (const auto& m : setup.models) {
    w.push_back(m.id == config.hv().id ? theta_0 : typical_weights(config, m.id));
  }
  return w;
}

}  // namespace

RoadModel road_of(const ScenarioConfig& config) {
  return RoadModel{config.lane_geometry(), config.limits, config.ts};
}

std::vector<ReferenceTrajectory> full_references(const ScenarioConfig& config, int margin) {
  if (margin < 0) throw std::invalid_argument("reference margin must be non-negative");
  const LaneGeometry lanes = config.lane_geometry();
  std::vector<ReferenceTrajectory> out;
  for (const VehicleConfig* v : sorted_vehicles(config)) {
    out.push_back(scenario::build_reference(v->behavior, v->initial, config.horizon + margin,
                                            config.ts, lanes, config.transition_length));
  }
  return out;
}

SegmentSetup full_horizon(const ScenarioConfig& config) {
  config.validate();
  SegmentSetup setup;
  setup.road = road_of(config);
  const auto refs = full_references(config);
  const auto vehicles = sorted_vehicles(config);
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const VehicleConfig& v = *vehicles[i];
    setup.models.push_back(PlayerModel{v.id, v.geometry, v.behavior, v.initial, refs[i]});
  }
  return setup;
}

SegmentSetup stage(const ScenarioConfig& config, const std::vector<ReferenceTrajectory>& full,
                   int first_step, int num_points, const std::vector<VehicleState>& initial) {
  const auto vehicles = sorted_vehicles(config);
  if (full.size() != vehicles.size() || initial.size() != vehicles.size()) {
    throw std::invalid_argument("stage: one reference and one initial state per vehicle");
  }
  if (num_points < 2) throw std::invalid_argument("stage must cover at least two points");
  SegmentSetup setup;
  setup.road = road_of(config);
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const int m = scenario::nearest_longitudinal_index(full[i], initial[i].px);
    if (m + num_points > full[i].size()) {
      throw std::invalid_argument("stage: reference of vehicle " + std::to_string(vehicles[i]->id) +
                                  " is too short for the stage");
    }
    ReferenceTrajectory ref = full[i].slice(m, num_points);
    ref.first_step = first_step;
    setup.models.push_back(PlayerModel{vehicles[i]->id, vehicles[i]->geometry,
                                       vehicles[i]->behavior, initial[i], std::move(ref)});
  }
  return setup;
}

GameSpec game_with_weights(const SegmentSetup& setup, const std::vector<StyleWeights>& weights) {
  if (weights.size() != setup.models.size()) {
    throw std::invalid_argument("game_with_weights: one weight vector per vehicle");
  }
  GameSpec g;
  g.road = setup.road;
  for (std::size_t i = 0; i < setup.models.size(); ++i) {
    GamePlayer p;
    p.model = setup.models[i];
    p.weights = weights[i];
    g.players.push_back(std::move(p));
  }
  g.normalize();
  return g;
}

GameSpec true_game(const SegmentSetup& setup, const ScenarioConfig& config) {
  std::vector<StyleWeights> w;
  for (const auto& m : setup.models) w.push_back(true_weights(config, m.id));
  return game_with_weights(setup, w);
}

GameSpec hv_subjective_game(const SegmentSetup& setup, const ScenarioConfig& config,
                            const StyleWeights& theta_0) {
  return game_with_weights(setup, hv_view_weights(setup, config, theta_0));
}

GameSpec cav_perceived_hv_game(const SegmentSetup& setup, const ScenarioConfig& config,
                               const StyleWeights& theta_0C) {
  return game_with_weights(setup, hv_view_weights(setup, config, theta_0C));
}

GameSpec cav_only_game(const SegmentSetup& setup, const ScenarioConfig& config,
                       const Strategy& hv, bool typical) {
  const int hv_id = config.hv().id;
  std::vector<StyleWeights> w;
  for (const auto& m : setup.models) {
    w.push_back(m.id == hv_id        ? true_weights(config, m.id)  // unused: fixed player
                : typical ? typical_weights(config, m.id)
                          : true_weights(config, m.id));
  }
  GameSpec g = game_with_weights(setup, w);
  GamePlayer& p = g.player(hv_id);
  if (!(hv.segment == p.model.segment())) {
    throw std::invalid_argument("fixed HV strategy covers a different segment");
  }
  p.decides = false;
  p.fixed = hv;
  g.validate();
  return g;
}

GameSpec cav_level1_game(const SegmentSetup& setup, const ScenarioConfig& config,
                         const StyleWeights& theta_0C) {
  std::vector<StyleWeights> w;
  for (const auto& m : setup.models) {
    w.push_back(m.id == config.hv().id ? theta_0C : true_weights(config, m.id));
  }
  return game_with_weights(setup, w);
}

StyleWeights random_cognition(const ScenarioConfig& config, double angle, Rng& rng) {
  const VehicleConfig& hv = config.hv();
  const std::vector<int> idx = effective_indices(hv.behavior.kind);
  const Eigen::VectorXd e = effective_part(hv.theta_true.theta, hv.behavior.kind).normalized();
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Eigen::VectorXd z(e.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    z -= z.dot(e) * e;
    if (z.norm() < 1e-12) continue;
    z.normalize();
    const Eigen::VectorXd d = std::cos(angle) * e + std::sin(angle) * z;
    if (d.minCoeff() < config.theta_bounds.min) continue;
    StyleWeights w = hv.theta_true;
    w.bounds = config.theta_bounds;
    for (std::size_t k = 0; k < idx.size(); ++k) w.theta(idx[k]) = d(static_cast<Eigen::Index>(k));
    return w;
  }
  throw std::runtime_error("random_cognition: no admissible direction at this angle");
}

CognitionModel predict_hv(const SegmentSetup& setup, const ScenarioConfig& config,
                          const StyleWeights& theta_0C, const SolverSettings& settings,
                          netsim::Transport transport) {
  const GameSpec g = cav_perceived_hv_game(setup, config, theta_0C);
  netsim::SessionResult session = netsim::run(g, settings, transport);
  CognitionModel out;
  out.theta_0C = theta_0C;
  out.s_0C = session.result.strategy(config.hv().id);
  out.equilibrium = std::move(session.result);
  out.trace = std::move(session.trace);
  return out;
}

CavPlan plan_cavs(const SegmentSetup& setup, const ScenarioConfig& config, const Strategy& s_0C,
                  const SolverSettings& settings, netsim::Transport transport) {
  const GameSpec g = cav_only_game(setup, config, s_0C, false);
  netsim::SessionResult session = netsim::run(g, settings, transport);
  return CavPlan{std::move(session.result), std::move(session.trace)};
}

HneVerdict verify_hne(const SegmentSetup& setup, const ScenarioConfig& config,
                      const Profile& profile, double perceptual_threshold,
                      const SolverSettings& settings, double cav_tolerance) {
  if (!(perceptual_threshold > 0.0)) throw std::invalid_argument("perceptual threshold must be > 0");
  if (profile.size() != setup.models.size()) {
    throw std::invalid_argument("verify_hne: profile must hold one strategy per vehicle");
  }
  HneVerdict v;
  v.perceptual_threshold = perceptual_threshold;
  v.cav_tolerance = cav_tolerance;
  const int hv_id = config.hv().id;

  const GameSpec truth = true_game(setup, config);
  for (std::size_t i = 0; i < truth.players.size(); ++i) {
    const int id = truth.players[i].model.id;
    if (id == hv_id) continue;
    game::PlayerProblem p(truth, static_cast<int>(i));
    p.prepare();
    const double current = p.objective(profile[i].data);
    const QpSolution sol = p.best_response(profile, settings);
    const double gap = sol.optimal() ? current - p.objective(sol.s_star)
                                     : std::numeric_limits<double>::infinity();
    v.cav_ids.push_back(id);
    v.cav_objectives.push_back(current);
    v.cav_gaps.push_back(gap);
    if (!(gap <= cav_tolerance * (1.0 + std::abs(current)))) v.failing.push_back(id);
  }

  const GameSpec hv_game = hv_subjective_game(setup, config, true_weights(config, hv_id));
  const int hv_index = hv_game.index_of(hv_id);
  game::PlayerProblem p(hv_game, hv_index);
  p.prepare();
  v.hv_objective = p.objective(profile[hv_index].data);
  const QpSolution sol = p.best_response(profile, settings);
  v.hv_gap = sol.optimal() ? v.hv_objective - p.objective(sol.s_star)
                           : std::numeric_limits<double>::infinity();
  v.hv_ok = v.hv_gap <= perceptual_threshold;
  if (!v.hv_ok) v.failing.insert(v.failing.begin(), hv_id);
  v.holds = v.failing.empty();
  return v;
}

ProbeResult misperception_gap_probe(const ScenarioConfig& config, const std::vector<double>& fractions,
                           const SolverSettings& settings) {
  const SegmentSetup setup = full_horizon(config);
  const int hv_id = config.hv().id;
  const GameSpec hv_game = hv_subjective_game(setup, config, true_weights(config, hv_id));
  const EquilibriumResult truth = game::solve_games(hv_game, settings);
  const Strategy& s_0 = truth.strategy(hv_id);
  const CognitionProfile base = CognitionProfile::of(config);

  ProbeResult out;
  for (double fraction : fractions) {
    if (fraction < 0.0) throw std::invalid_argument("probe fractions must be non-negative");
    ScenarioConfig member = config;
    for (auto& v : member.vehicles) {
      if (v.role != VehicleRole::kConnected) continue;
      const Theta ave = base.typical(v.id).theta;
      v.theta_true.theta = ave + fraction * (v.theta_true.theta - ave);
    }
    const CavPlan plan = plan_cavs(setup, member, s_0, settings, netsim::Transport::kCentralized);
    const HneVerdict verdict =
        verify_hne(setup, member, plan.equilibrium.strategies, 1.0, settings);
    out.rows.push_back({fraction, CognitionProfile::of(member).cognitive_threshold,
                        verdict.hv_gap, truth.converged && plan.ok()});
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const ProbeRow& a, const ProbeRow& b) { return a.cognitive_threshold < b.cognitive_threshold; });

  double num = 0.0;
  double den = 0.0;
  for (const auto& r : out.rows) {
    num += r.cognitive_threshold * r.hv_gap;
    den += r.cognitive_threshold * r.cognitive_threshold;
  }
  out.slope = den > 0.0 ? num / den : 0.0;
  out.monotone = true;
  const double tol = 1e-4 * (1.0 + std::abs(truth.objective(hv_id)));
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    if (out.rows[k].hv_gap + tol < out.rows[k - 1].hv_gap) out.monotone = false;
  }
  return out;
}

}  // namespace cognition
}  // namespace hypercog
