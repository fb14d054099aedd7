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
// Who believes what. The same physical scenario is played as several games
// that differ only in the weights each player is assumed to have:
//
//   true game         every vehicle with its true weights
//   HV's game         HV true, CAVs at their style-typical weights
//   CAVs' HV model    as the HV's game, HV at the CAVs' estimate theta_0C
//   CAV planning      CAVs only, true weights, HV fixed at a prediction
//   CAV level-1 game  every vehicle decides, CAVs true, HV at theta_0C
//
// The HV only knows the CAVs' driving styles, so in its game the CAVs carry
// the typical weights of their style. CAVs know this and simulate the HV's
// game with their estimate of the HV's weights to predict it.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <optional>
#include <vector>

#include "hypercog/game.hpp"
#include "hypercog/netsim.hpp"
#include "hypercog/random.hpp"
#include "hypercog/scenario.hpp"

namespace hypercog {

// Vehicles restricted to one segment of time points, ascending id.
struct SegmentSetup {
  RoadModel road;
  std::vector<PlayerModel> models;

  Segment segment() const;
  const PlayerModel& model(int id) const;
};

struct CognitionProfile {
  std::vector<int> cav_ids;
  std::vector<StyleWeights> theta_ave;  // same order as cav_ids
  // Max over CAVs of ||theta_eff,true - theta_eff,ave||.
  double cognitive_threshold = 0.0;

  static CognitionProfile of(const ScenarioConfig& config);
  const StyleWeights& typical(int id) const;
};

struct CognitionModel {
  StyleWeights theta_0C;
  Strategy s_0C;
  // Every player's strategy in the simulated HV's game; the CAV entries are
  // the CAVs as the HV would compute them.
  EquilibriumResult equilibrium;
  netsim::SessionTrace trace;

  const Strategy& cav_in_hv_view(int id) const { return equilibrium.strategy(id); }
};

struct CavPlan {
  EquilibriumResult equilibrium;
  netsim::SessionTrace trace;

  // Converged and no best response was infeasible.
  bool ok() const { return equilibrium.converged && !equilibrium.degraded; }
};

struct HneVerdict {
  std::vector<int> cav_ids;
  std::vector<double> cav_gaps;
  std::vector<double> cav_objectives;
  double hv_gap = 0.0;
  double hv_objective = 0.0;
  double perceptual_threshold = 0.0;
  double cav_tolerance = 0.0;
  bool hv_ok = false;
  std::vector<int> failing;  // ids that do not best-respond
  bool holds = false;
};

struct ProbeRow {
  double fraction = 0.0;            // interpolation weight towards theta_true
  double cognitive_threshold = 0.0;  // epsilon_c of this member
  double hv_gap = 0.0;
  bool converged = false;
};

struct ProbeResult {
  std::vector<ProbeRow> rows;
  double slope = 0.0;  // least-squares slope of gap over epsilon_c through the origin
  bool monotone = false;
};

namespace cognition {

RoadModel road_of(const ScenarioConfig& config);

// References over `horizon + margin` points for every vehicle, ascending id.
std::vector<ReferenceTrajectory> full_references(const ScenarioConfig& config, int margin = 0);

SegmentSetup full_horizon(const ScenarioConfig& config);

// Segment of `num_points` points starting at global time point `first_step`.
// `initial` holds each vehicle's state at first_step (ascending id). Each
// reference is the part of the full reference starting at the point nearest
// in p_x to the vehicle's initial position.
SegmentSetup stage(const ScenarioConfig& config, const std::vector<ReferenceTrajectory>& full,
                   int first_step, int num_points, const std::vector<VehicleState>& initial);

// All vehicles decide with the given weights (ascending id).
GameSpec game_with_weights(const SegmentSetup& setup, const std::vector<StyleWeights>& weights);

GameSpec true_game(const SegmentSetup& setup, const ScenarioConfig& config);
GameSpec hv_subjective_game(const SegmentSetup& setup, const ScenarioConfig& config,
                            const StyleWeights& theta_0);
GameSpec cav_perceived_hv_game(const SegmentSetup& setup, const ScenarioConfig& config,
                               const StyleWeights& theta_0C);
// CAVs decide, the HV is fixed at `hv`. With `typical` the CAVs use their
// style-typical weights, otherwise their true weights.
GameSpec cav_only_game(const SegmentSetup& setup, const ScenarioConfig& config,
                       const Strategy& hv, bool typical);
GameSpec cav_level1_game(const SegmentSetup& setup, const ScenarioConfig& config,
                         const StyleWeights& theta_0C);

// Weights of a unit effective vector at `angle` (radians) from the HV's true
// effective weights, along a uniformly drawn orthogonal direction. Draws are
// repeated until every effective component is at least the bound minimum.
StyleWeights random_cognition(const ScenarioConfig& config, double angle, Rng& rng);

CognitionModel predict_hv(const SegmentSetup& setup, const ScenarioConfig& config,
                          const StyleWeights& theta_0C, const SolverSettings& settings,
                          netsim::Transport transport = netsim::Transport::kDistributed);

CavPlan plan_cavs(const SegmentSetup& setup, const ScenarioConfig& config, const Strategy& s_0C,
                  const SolverSettings& settings,
                  netsim::Transport transport = netsim::Transport::kDistributed);

// `profile` holds one strategy per vehicle, ascending id. CAVs are checked in
// the true game with relative tolerance `cav_tolerance` (gap <= tol (1 + |J|));
// the HV in its own game against the CAV strategies of the profile.
HneVerdict verify_hne(const SegmentSetup& setup, const ScenarioConfig& config,
                      const Profile& profile, double perceptual_threshold,
                      const SolverSettings& settings, double cav_tolerance = 1e-4);

// Interpolates every CAV's true weights towards its typical weights by each
// fraction, plans the CAVs against the HV's equilibrium strategy and records
// the HV's best-response gap.
ProbeResult misperception_gap_probe(const ScenarioConfig& config, const std::vector<double>& fractions,
                           const SolverSettings& settings);

}  // namespace cognition
}  // namespace hypercog
