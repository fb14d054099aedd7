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
// Quadratic tracking games. Player i minimizes
//
//   J_i(s_i) = 1/2 (s_i - s_ref,i)' diag(theta_bar_i) (s_i - s_ref,i)
//
// over its constraint set, which depends on the other players' positions
// through the collision rows. Equilibria are computed by Gauss-Seidel best
// responses in ascending player id.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hypercog/constraints.hpp"
#include "hypercog/qp.hpp"
#include "hypercog/scenario.hpp"

namespace hypercog {

struct GamePlayer {
  PlayerModel model;
  // Weights used in this game instance; they depend on who is imagining it.
  StyleWeights weights;
  bool decides = true;
  // Strategy of a non-deciding player; ignored for deciding players.
  Strategy fixed;
};

struct GameSpec {
  RoadModel road;
  std::vector<GamePlayer> players;  // ascending id

  Segment segment() const;
  int index_of(int id) const;
  const GamePlayer& player(int id) const;
  GamePlayer& player(int id);
  std::vector<int> decision_ids() const;
  // Sorts players by id and checks ids, segments and fixed strategies.
  void normalize();
  void validate() const;
};

// One strategy per GameSpec player, same order.
using Profile = std::vector<Strategy>;

struct EquilibriumResult {
  std::vector<int> ids;
  Profile strategies;
  int iterations = 0;
  // Per player (same order as ids); zero for fixed players.
  std::vector<double> objectives;
  std::vector<double> gaps;
  double max_violation = 0.0;
  double last_progress = 0.0;
  bool converged = false;
  // Some best response was infeasible in the last sweep.
  bool degraded = false;
  std::vector<int> infeasible_players;

  const Strategy& strategy(int id) const;
  double gap(int id) const;
  double objective(int id) const;
};

struct VeDiagnostics {
  std::vector<int> ids;  // decision players
  std::vector<double> objectives;
  std::vector<double> gaps;  // +inf when the best response is infeasible
  double max_violation = 0.0;

  double max_gap() const;
};

namespace game {

// Diagonal of R, Q, R, Q, ... with Q = diag(px, py, v, psi), R = diag(a, delta).
Eigen::VectorXd theta_bar(const Theta& theta, Segment segment);

struct ObjectiveData {
  Eigen::VectorXd theta_bar;
  Eigen::VectorXd s_ref;
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
};

ObjectiveData objective_qp_data(const StyleWeights& weights, const ReferenceTrajectory& reference);

// 1/2 (s - s_ref)' theta_bar (s - s_ref).
double objective_value(const Theta& theta, const ReferenceTrajectory& reference,
                       const Eigen::VectorXd& s);

// Stacks theta_bar_i (s_i - s_ref,i) over the given players.
Eigen::VectorXd pseudo_gradient(const std::vector<Eigen::VectorXd>& strategies,
                                const std::vector<Theta>& weights,
                                const std::vector<ReferenceTrajectory>& references);

// ||s_new - s_old|| / max(1, ||s_old||).
double relative_progress(const Eigen::VectorXd& s_new, const Eigen::VectorXd& s_old);

// Initial profile: references for deciding players, fixed strategies otherwise.
Profile initial_profile(const GameSpec& game);

// The best-response problem of one player. Construction assembles the static
// rows and objective; prepare() factors the equality rows, which only the
// node that solves this player needs.
class PlayerProblem {
 public:
  PlayerProblem(const GameSpec& game, int index);

  int id() const { return id_; }
  int index() const { return index_; }
  void prepare();
  bool prepared() const { return reduction_.has_value(); }

  ConstraintSystem system(const Profile& profile) const;
  QpProblem qp(const Profile& profile) const;
  // Requires prepare().
  QpSolution best_response(const Profile& profile, const SolverSettings& settings) const;
  double objective(const Eigen::VectorXd& s) const;
  double violation(const Profile& profile) const;

 private:
  const GameSpec* game_;
  int index_;
  int id_;
  ObjectiveData objective_;
  ConstraintSystem static_;
  std::optional<EqualityReduction> reduction_;
};

QpSolution best_response(const GameSpec& game, int id, const Profile& profile,
                         const SolverSettings& settings);

// Largest violation over deciding players' systems evaluated at the profile.
double profile_violation(const std::vector<PlayerProblem>& problems, const Profile& profile);

// Gauss-Seidel sweeps; `initial` defaults to initial_profile(game).
EquilibriumResult solve_games(const GameSpec& game, const SolverSettings& settings,
                              std::optional<Profile> initial = std::nullopt);

VeDiagnostics ve_residual(const GameSpec& game, const Profile& profile,
                          const SolverSettings& settings);

}  // namespace game
}  // namespace hypercog
