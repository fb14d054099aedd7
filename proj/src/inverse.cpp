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

#include "hypercog/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypercog {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void InverseSettings::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(omega_dist >= 0.0)) throw std::invalid_argument("omega_dist must be non-negative");
  if (!(bounds.min > 0.0) || !(bounds.max > bounds.min)) {
    throw std::invalid_argument("theta bounds must satisfy 0 < min < max");
  }
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
  if (!(identifiability_threshold > 0.0)) {
    throw std::invalid_argument("identifiability_threshold must be positive");
  }
}

namespace inverse {

namespace {

// Columns: theta_bar(e_c) (s_hat - s_ref) for every theta component c.
MatrixXd gradient_columns(const PlayerModel& hv, const Strategy& s_hat) {
  const Segment seg = hv.segment();
  if (!(s_hat.segment == seg) || s_hat.data.size() != seg.strategy_size()) {
    throw std::invalid_argument("observation does not match the HV's segment");
  }
  const VectorXd e = s_hat.data - Strategy::from_reference(hv.reference).data;
  MatrixXd cols(e.size(), 6);
  for (int c = 0; c < 6; ++c) {
    cols.col(c) = game::theta_bar(Theta::Unit(c), seg).cwiseProduct(e);
  }
  return cols;
}

// theta with effective components `eff` (any scale) and the remaining ones
// taken from `anchor`, rescaled to the same effective norm.
Theta assemble_theta(const VectorXd& eff, const std::vector<int>& idx, const Theta& anchor,
                     BehaviorKind kind) {
  const double anchor_norm = effective_part(anchor, kind).norm();
  Theta out = anchor * (anchor_norm > 0.0 ? eff.norm() / anchor_norm : 1.0);
  for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k]) = eff(static_cast<Eigen::Index>(k));
  return out;
}

VectorXd unit_sum(const VectorXd& v) {
  const double s = v.sum();
  if (!(s > 0.0)) throw std::invalid_argument("weights must have a positive effective sum");
  return v / s;
}

}  // namespace

MatrixXd theta_coefficients(const PlayerModel& hv, const Strategy& s_hat,
                            const MatrixXd& null_basis) {
  const MatrixXd cols = gradient_columns(hv, s_hat);
  const std::vector<int> idx = effective_indices(hv.behavior.kind);
  MatrixXd out(null_basis.cols(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = null_basis.transpose() * cols.col(idx[k]);
  }
  return out;
}

InverseResult fit(const PlayerModel& hv, const ConstraintSystem& system, const Strategy& s_hat,
                  const Theta& anchor, const std::optional<Theta>& previous,
                  const InverseSettings& settings, const SolverSettings& solver) {
  settings.validate();
  const BehaviorKind kind = hv.behavior.kind;
  const std::vector<int> idx = effective_indices(kind);
  const int ne = static_cast<int>(idx.size());
  const int n = s_hat.segment.strategy_size();
  if (system.num_variables() != n) throw std::invalid_argument("constraint system size mismatch");

  InverseResult out;

  // Row activity at the observation.
  const VectorXd g = system.in.A * s_hat.data - system.in.b;
  std::vector<int> active;
  for (int j = 0; j < system.in.rows(); ++j) {
    RowActivity r{system.in.tags[j], g(j), g(j) + settings.kappa >= 0.0, g(j) > settings.kappa};
    if (r.active) active.push_back(j);
    if (r.violated) ++out.num_violated;
    out.rows.push_back(r);
  }
  out.num_active = static_cast<int>(active.size());
  if (out.num_violated > 0) {
    out.warnings.push_back(std::to_string(out.num_violated) +
                           " inequality rows violated by more than kappa at the observation; "
                           "treated as active");
  }
  const int na = out.num_active;

  const EqualityReduction reduction(system.eq.A, system.eq.b);
  const MatrixXd& Z = reduction.null_basis();
  const MatrixXd cols = gradient_columns(hv, s_hat);

  // Residual Z' (cols theta + G lambda) = M x + r0 with x = (theta_eff, lambda_active).
  MatrixXd M(Z.cols(), ne + na);
  for (int k = 0; k < ne; ++k) M.col(k) = Z.transpose() * cols.col(idx[k]);
  for (int a = 0; a < na; ++a) M.col(ne + a) = Z.transpose() * system.in.A.row(active[a]).transpose();

  // Non-effective components stay at the anchor's values in sum-one scale.
  const VectorXd anchor_eff = unit_sum(effective_part(anchor, kind));
  const Theta anchor_scaled = assemble_theta(anchor_eff, idx, anchor, kind);
  VectorXd r0 = VectorXd::Zero(Z.cols());
  for (int c = 0; c < 6; ++c) {
    if (std::find(idx.begin(), idx.end(), c) != idx.end()) continue;
    r0 += Z.transpose() * cols.col(c) * anchor_scaled(c);
  }

  const MatrixXd theta_block = M.leftCols(ne);
  if (theta_block.rows() == 0) {
    out.sigma_min = 0.0;
  } else {
    Eigen::JacobiSVD<MatrixXd> svd(theta_block);
    out.sigma_min = theta_block.rows() >= ne ? svd.singularValues()(ne - 1) : 0.0;
  }
  out.low_identifiability = out.sigma_min < settings.identifiability_threshold;

  // omega weighs weight movement against the residual divided by
  // ||Z' cols_eff||_F^2, a dimensionless fit quality that does not depend on
  // how far the observation strays from the reference. Scaling omega instead
  // of the residual keeps the QP in the residual's units.
  const double residual_scale = theta_block.squaredNorm();
  const double omega = settings.omega_dist * (residual_scale > 0.0 ? residual_scale : 1.0);

  // 1/2 x' H x + f' x equals ||M x + r0||^2 + omega ||theta - prev||^2 + ridge
  // terms, up to a constant.
  MatrixXd H = 2.0 * M.transpose() * M;
  VectorXd f = 2.0 * M.transpose() * r0;
  const double ridge = settings.ridge * std::max(1.0, H.diagonal().mean());
  H.diagonal().array() += 2.0 * ridge;
  f.head(ne) -= 2.0 * ridge * anchor_eff;
  VectorXd prev_eff;
  const bool conservative = previous.has_value() && settings.omega_dist > 0.0;
  if (conservative) {
    prev_eff = unit_sum(effective_part(*previous, kind));
    H.topLeftCorner(ne, ne).diagonal().array() += 2.0 * omega;
    f.head(ne) -= 2.0 * omega * prev_eff;
  }
  H = 0.5 * (H + H.transpose());

  QpProblem q;
  q.H = H;
  q.f = f;
  q.A_eq = MatrixXd::Zero(1, ne + na);
  q.A_eq.leftCols(ne).setOnes();
  q.b_eq = VectorXd::Ones(1);
  q.A_in = MatrixXd::Zero(2 * ne + na, ne + na);
  q.b_in = VectorXd::Zero(2 * ne + na);
  for (int k = 0; k < ne; ++k) {
    q.A_in(k, k) = -1.0;
    q.b_in(k) = -settings.bounds.min;
    q.A_in(ne + k, k) = 1.0;
    q.b_in(ne + k) = settings.bounds.max;
  }
  for (int a = 0; a < na; ++a) q.A_in(2 * ne + a, ne + a) = -1.0;

  const QpSolution sol = qp::solve(q, solver);
  if (!sol.optimal()) {
    throw std::runtime_error(std::string("inverse fit QP did not solve: ") +
                             std::string(to_string(sol.status)));
  }
  const VectorXd x = sol.s_star;
  const VectorXd theta_eff = x.head(ne);

  out.theta_raw = assemble_theta(theta_eff, idx, anchor, kind);
  out.theta_0C.bounds = settings.bounds;
  if (out.low_identifiability) {
    // Some weight directions leave the residual unchanged; the fit there only
    // reflects the sum constraint, so keep the anchor.
    out.theta_0C.theta = normalize_effective(anchor, kind);
    out.warnings.push_back("weights not identifiable from the observation; keeping the anchor");
  } else {
    out.theta_0C.theta = normalize_effective(out.theta_raw, kind);
  }

  out.lambda = VectorXd::Zero(system.in.rows());
  for (int a = 0; a < na; ++a) out.lambda(active[a]) = std::max(0.0, x(ne + a));

  // Unprojected residual with the least-squares equality multipliers.
  VectorXd stat = cols * out.theta_raw + system.in.A.transpose() * out.lambda;
  out.mu = system.eq.rows() > 0 ? VectorXd(-reduction.multipliers(stat)) : VectorXd();
  if (system.eq.rows() > 0) stat += system.eq.A.transpose() * out.mu;
  out.stationarity_residual = stat.norm();

  const VectorXd resid = M * x + r0;
  out.objective = resid.squaredNorm();
  if (conservative) out.objective += omega * (theta_eff - prev_eff).squaredNorm();
  return out;
}

namespace {

InverseResult interpret(const Observation& observation, const SegmentSetup& setup,
                        const ScenarioConfig& config, const Theta& anchor,
                        const std::optional<Theta>& previous, const InverseSettings& settings,
                        const SolverSettings& solver, netsim::Transport transport) {
  const int hv_id = config.hv().id;
  const GameSpec g = cognition::cav_only_game(setup, config, observation.s_hat, true);
  netsim::SessionResult session = netsim::run(g, solver, transport);
  const game::PlayerProblem hv_problem(g, g.index_of(hv_id));
  const ConstraintSystem system = hv_problem.system(session.result.strategies);
  InverseResult out = fit(g.player(hv_id).model, system, observation.s_hat, anchor, previous,
                          settings, solver);
  if (!session.result.converged) {
    out.warnings.push_back("CAV-only game at typical weights did not converge");
  }
  out.cav_view = std::move(session.result);
  out.trace = std::move(session.trace);
  return out;
}

}  // namespace

InverseResult interpret_offline(const Observation& observation, const SegmentSetup& setup,
                                const ScenarioConfig& config, const InverseSettings& settings,
                                const SolverSettings& solver, netsim::Transport transport) {
  const VehicleConfig& hv = config.hv();
  const Theta anchor = style_weights_for(hv.behavior.kind, hv.style, settings.bounds).theta;
  return interpret(observation, setup, config, anchor, std::nullopt, settings, solver, transport);
}

InverseResult interpret_online(const Observation& observation, const StyleWeights& previous,
                               const SegmentSetup& setup, const ScenarioConfig& config,
                               const InverseSettings& settings, const SolverSettings& solver,
                               bool include_conservativeness, netsim::Transport transport) {
  std::optional<Theta> prev;
  if (include_conservativeness) prev = previous.theta;
  return interpret(observation, setup, config, previous.theta, prev, settings, solver, transport);
}

double parameter_error(const Theta& estimate, const Theta& truth, BehaviorKind behavior) {
  const VectorXd e = effective_part(estimate, behavior).normalized();
  const VectorXd t = effective_part(truth, behavior).normalized();
  return (e - t).norm() / t.norm();
}

}  // namespace inverse
}  // namespace hypercog
