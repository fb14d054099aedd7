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
// Recovering the HV's objective weights from an observed trajectory.
//
// If the observed strategy s_hat were optimal for weights theta, there would
// be multipliers with
//
//   theta_bar (s_hat - s_ref) + A_in' lambda + A_eq' mu = 0,   lambda >= 0,
//
// and lambda_j = 0 on rows that are clearly slack (g_j + kappa < 0). The fit
// minimizes the squared residual of that identity. The first term is linear
// in theta, so the problem is a convex QP. mu is free and is eliminated by
// projecting onto the null space of A_eq. The residual is homogeneous in
// (theta, lambda), so the effective weights are fixed to sum to one; the
// reported weights are then rescaled to unit effective norm. When some
// direction of the effective weights does not change the residual (for
// example an HV that never left its reference) the anchor is reported.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hypercog/cognition.hpp"
#include "hypercog/constraints.hpp"
#include "hypercog/game.hpp"

namespace hypercog {

struct Observation {
  // Observed HV strategy; same layout as Strategy.
  Strategy s_hat;
  // Noise metadata: which state component was perturbed and how.
  std::string perturbed = "px";
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

struct InverseSettings {
  double kappa = 1.5;
  double omega_dist = 0.0;
  ThetaBounds bounds;
  // Tikhonov weight relative to the mean curvature of the residual term;
  // only selects a solution along unidentifiable directions.
  double ridge = 1e-9;
  double identifiability_threshold = 1e-8;

  void validate() const;
};

struct RowActivity {
  RowTag tag;
  double value = 0.0;  // g_j(s_hat)
  bool active = false;
  bool violated = false;  // g_j > kappa; kept active with a warning
};

struct InverseResult {
  StyleWeights theta_0C;  // unit effective norm
  Theta theta_raw;        // effective components sum to one
  Eigen::VectorXd lambda;  // one per inequality row, zero where inactive
  Eigen::VectorXd mu;
  double stationarity_residual = 0.0;  // ||grad J + A_in' lambda + A_eq' mu||
  double objective = 0.0;             // fit objective incl. the conservativeness term
  std::vector<RowActivity> rows;
  int num_active = 0;
  int num_violated = 0;
  double sigma_min = 0.0;  // of the projected theta coefficients
  bool low_identifiability = false;
  std::vector<std::string> warnings;
  // CAV strategies the HV is assumed to have seen (HV entry = s_hat).
  EquilibriumResult cav_view;
  netsim::SessionTrace trace;
};

namespace inverse {

// Projected coefficient matrix of the effective weights: column c is
// Z' theta_bar(e_c) (s_hat - s_ref).
Eigen::MatrixXd theta_coefficients(const PlayerModel& hv, const Strategy& s_hat,
                                   const Eigen::MatrixXd& null_basis);

// Fit against a given constraint system of the HV. `anchor` selects the
// solution in unidentifiable directions and supplies non-effective
// components; `previous` enables the conservativeness term.
InverseResult fit(const PlayerModel& hv, const ConstraintSystem& system, const Strategy& s_hat,
                  const Theta& anchor, const std::optional<Theta>& previous,
                  const InverseSettings& settings, const SolverSettings& solver);

// Solves the CAV-only game at typical weights with the HV fixed at the
// observation, then fits. The anchor is the HV's style-typical weights.
InverseResult interpret_offline(const Observation& observation, const SegmentSetup& setup,
                                const ScenarioConfig& config, const InverseSettings& settings,
                                const SolverSettings& solver,
                                netsim::Transport transport = netsim::Transport::kDistributed);

// As interpret_offline on a stage segment, anchored at `previous`; the
// conservativeness term is added when `include_conservativeness` is set.
InverseResult interpret_online(const Observation& observation, const StyleWeights& previous,
                               const SegmentSetup& setup, const ScenarioConfig& config,
                               const InverseSettings& settings, const SolverSettings& solver,
                               bool include_conservativeness,
                               netsim::Transport transport = netsim::Transport::kDistributed);

// ||theta_eff,est - theta_eff,true|| / ||theta_eff,true|| after normalizing both.
double parameter_error(const Theta& estimate, const Theta& truth, BehaviorKind behavior);

}  // namespace inverse
}  // namespace hypercog
