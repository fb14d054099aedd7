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

#include "hypercog/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace hypercog {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Segment GameSpec::segment() const {
  if (players.empty()) throw std::invalid_argument("game has no players");
  return players.front().model.segment();
}

int GameSpec::index_of(int id) const {
  for (std::size_t i = 0; i < players.size(); ++i) {
    if (players[i].model.id == id) return static_cast<int>(i);
  }
  throw std::out_of_range("game has no player " + std::to_string(id));
}

const GamePlayer& GameSpec::player(int id) const { return players[index_of(id)]; }
GamePlayer& GameSpec::player(int id) { return players[index_of(id)]; }

std::vector<int> GameSpec::decision_ids() const {
  std::vector<int> ids;
  for (const auto& p : players) {
    if (p.decides) ids.push_back(p.model.id);
  }
  return ids;
}

void GameSpec::normalize() {
  std::sort(players.begin(), players.end(), [](const GamePlayer& a, const GamePlayer& b) {
    return a.model.id < b.model.id;
  });
  validate();
}

void GameSpec::validate() const {
  if (players.empty()) throw std::invalid_argument("game has no players");
  const Segment seg = segment();
  std::set<int> ids;
  int last = std::numeric_limits<int>::min();
  for (const auto& p : players) {
    const int id = p.model.id;
    if (!ids.insert(id).second) throw std::invalid_argument("duplicate player " + std::to_string(id));
    if (id < last) throw std::invalid_argument("players must be sorted by id");
    last = id;
    if (!(p.model.segment() == seg)) {
      throw std::invalid_argument("player " + std::to_string(id) + " covers a different segment");
    }
    if (!p.decides && !(p.fixed.segment == seg && p.fixed.data.size() == seg.strategy_size())) {
      throw std::invalid_argument("fixed player " + std::to_string(id) +
                                  " lacks a strategy for the segment");
    }
  }
}

const Strategy& EquilibriumResult::strategy(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return strategies[i];
  }
  throw std::out_of_range("no strategy for player " + std::to_string(id));
}

double EquilibriumResult::gap(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return gaps[i];
  }
  throw std::out_of_range("no gap for player " + std::to_string(id));
}

double EquilibriumResult::objective(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return objectives[i];
  }
  throw std::out_of_range("no objective for player " + std::to_string(id));
}

double VeDiagnostics::max_gap() const {
  double g = 0.0;
  for (double x : gaps) g = std::max(g, x);
  return g;
}

namespace game {

VectorXd theta_bar(const Theta& theta, Segment segment) {
  const int n = segment.num_steps();
  VectorXd d(6 * n);
  for (int j = 0; j < n; ++j) {
    d.segment<2>(6 * j) << theta(kThetaA), theta(kThetaDelta);
    d.segment<4>(6 * j + 2) << theta(kThetaPx), theta(kThetaPy), theta(kThetaV), theta(kThetaPsi);
  }
  return d;
}

ObjectiveData objective_qp_data(const StyleWeights& weights, const ReferenceTrajectory& reference) {
  if (reference.size() < 2) throw std::invalid_argument("segment must cover at least two points");
  ObjectiveData out;
  const Segment seg{reference.first_step, reference.size()};
  out.theta_bar = theta_bar(weights.theta, seg);
  out.s_ref = Strategy::from_reference(reference).data;
  out.H = out.theta_bar.asDiagonal();
  out.f = -out.theta_bar.cwiseProduct(out.s_ref);
  return out;
}

double objective_value(const Theta& theta, const ReferenceTrajectory& reference, const VectorXd& s) {
  const Segment seg{reference.first_step, reference.size()};
  const VectorXd e = s - Strategy::from_reference(reference).data;
  return 0.5 * e.dot(theta_bar(theta, seg).cwiseProduct(e));
}

VectorXd pseudo_gradient(const std::vector<VectorXd>& strategies, const std::vector<Theta>& weights,
                         const std::vector<ReferenceTrajectory>& references) {
  if (strategies.size() != weights.size() || strategies.size() != references.size()) {
    throw std::invalid_argument("pseudo_gradient: inconsistent player counts");
  }
  Eigen::Index total = 0;
  for (const auto& s : strategies) total += s.size();
  VectorXd g(total);
  Eigen::Index o = 0;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const Segment seg{references[i].first_step, references[i].size()};
    if (strategies[i].size() != seg.strategy_size()) {
      throw std::invalid_argument("pseudo_gradient: strategy does not match its reference");
    }
    const VectorXd e = strategies[i] - Strategy::from_reference(references[i]).data;
    g.segment(o, e.size()) = theta_bar(weights[i], seg).cwiseProduct(e);
    o += e.size();
  }
  return g;
}

double relative_progress(const VectorXd& s_new, const VectorXd& s_old) {
  return (s_new - s_old).norm() / std::max(1.0, s_old.norm());
}

Profile initial_profile(const GameSpec& game) {
  Profile profile;
  profile.reserve(game.players.size());
  for (const auto& p : game.players) {
    profile.push_back(p.decides ? Strategy::from_reference(p.model.reference) : p.fixed);
  }
  return profile;
}

PlayerProblem::PlayerProblem(const GameSpec& game, int index)
    : game_(&game), index_(index), id_(game.players.at(index).model.id) {
  const GamePlayer& p = game.players[index];
  objective_ = objective_qp_data(p.weights, p.model.reference);
  static_ = constraints::assemble_static(p.model, game.road);
}

void PlayerProblem::prepare() {
  if (!reduction_) reduction_.emplace(static_.eq.A, static_.eq.b);
}

ConstraintSystem PlayerProblem::system(const Profile& profile) const {
  if (profile.size() != game_->players.size()) {
    throw std::invalid_argument("profile does not cover every player");
  }
  std::vector<constraints::Opponent> opponents;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (static_cast<int>(j) == index_) continue;
    opponents.push_back({game_->players[j].model.id, &profile[j]});
  }
  return constraints::with_collisions(static_, game_->players[index_].model, std::move(opponents));
}

QpProblem PlayerProblem::qp(const Profile& profile) const {
  ConstraintSystem sys = system(profile);
  QpProblem q;
  q.H = objective_.H;
  q.f = objective_.f;
  q.A_eq = std::move(sys.eq.A);
  q.b_eq = std::move(sys.eq.b);
  q.A_in = std::move(sys.in.A);
  q.b_in = std::move(sys.in.b);
  return q;
}

QpSolution PlayerProblem::best_response(const Profile& profile,
                                        const SolverSettings& settings) const {
  if (!reduction_) throw std::logic_error("PlayerProblem::prepare() was not called");
  return qp::solve(qp(profile), *reduction_, settings);
}

double PlayerProblem::objective(const VectorXd& s) const {
  const VectorXd e = s - objective_.s_ref;
  return 0.5 * e.dot(objective_.theta_bar.cwiseProduct(e));
}

double PlayerProblem::violation(const Profile& profile) const {
  return system(profile).violation(profile[index_].data);
}

QpSolution best_response(const GameSpec& game, int id, const Profile& profile,
                         const SolverSettings& settings) {
  PlayerProblem problem(game, game.index_of(id));
  problem.prepare();
  return problem.best_response(profile, settings);
}

double profile_violation(const std::vector<PlayerProblem>& problems, const Profile& profile) {
  double v = 0.0;
  for (const auto& p : problems) v = std::max(v, p.violation(profile));
  return v;
}

EquilibriumResult solve_games(const GameSpec& game, const SolverSettings& settings,
                              std::optional<Profile> initial) {
  game.validate();
  settings.validate();
  Profile profile = initial ? std::move(*initial) : initial_profile(game);
  if (profile.size() != game.players.size()) {
    throw std::invalid_argument("initial profile does not cover every player");
  }

  std::vector<PlayerProblem> problems;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    if (!game.players[i].decides) continue;
    problems.emplace_back(game, static_cast<int>(i));
    problems.back().prepare();
  }

  EquilibriumResult result;
  for (int zeta = 1; zeta <= settings.max_iterations; ++zeta) {
    double progress = 0.0;
    result.degraded = false;
    result.infeasible_players.clear();
    for (const auto& problem : problems) {
      const QpSolution sol = problem.best_response(profile, settings);
      Strategy& current = profile[problem.index()];
      if (sol.optimal()) {
        progress = std::max(progress, relative_progress(sol.s_star, current.data));
        current.data = sol.s_star;
      } else {
        result.degraded = true;
        result.infeasible_players.push_back(problem.id());
      }
    }
    result.iterations = zeta;
    result.last_progress = progress;
    result.max_violation = profile_violation(problems, profile);
    if (progress <= settings.relative_step_progress &&
        result.max_violation <= settings.constraint_violation_threshold && !result.degraded) {
      result.converged = true;
      break;
    }
  }

  const VeDiagnostics diag = ve_residual(game, profile, settings);
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    result.ids.push_back(game.players[i].model.id);
    double gap = 0.0;
    double obj = 0.0;
    for (std::size_t k = 0; k < diag.ids.size(); ++k) {
      if (diag.ids[k] == result.ids.back()) {
        gap = diag.gaps[k];
        obj = diag.objectives[k];
      }
    }
    result.gaps.push_back(gap);
    result.objectives.push_back(obj);
  }
  result.strategies = std::move(profile);
  return result;
}

VeDiagnostics ve_residual(const GameSpec& game, const Profile& profile,
                          const SolverSettings& settings) {
  VeDiagnostics out;
  for (std::size_t i = 0; i < game.players.size(); ++i) {
    if (!game.players[i].decides) continue;
    PlayerProblem problem(game, static_cast<int>(i));
    problem.prepare();
    const double current = problem.objective(profile[i].data);
    const QpSolution sol = problem.best_response(profile, settings);
    out.ids.push_back(problem.id());
    out.objectives.push_back(current);
    out.gaps.push_back(sol.optimal() ? current - problem.objective(sol.s_star)
                                     : std::numeric_limits<double>::infinity());
    out.max_violation = std::max(out.max_violation, problem.violation(profile));
  }
  return out;
}

}  // namespace game
}  // namespace hypercog
