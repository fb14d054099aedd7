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
// Dense convex QP solver:
//
//   minimize    1/2 s' H s + f' s
//   subject to  A_eq s  = b_eq
//               A_in s <= b_in
//
// Equalities are eliminated through a null-space basis obtained from a
// column-pivoted QR factorization of A_eq'. The reduced inequality-constrained
// problem is solved with the dual active-set method of Goldfarb and Idnani,
// which starts from the unconstrained minimizer and adds violated constraints
// one at a time. Multipliers of the equalities are recovered afterwards from
// the stationarity condition.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace hypercog {

struct SolverSettings {
  // Maximum tolerated constraint violation of an equilibrium (epsilon).
  double constraint_violation_threshold = 1e-3;
  // Relative step progress of the best-response loop (epsilon_step).
  double relative_step_progress = 1e-2;
  // Best-response sweeps (zeta_max).
  int max_iterations = 100;
  // Feasibility/stationarity tolerance of a single QP solve.
  double qp_tolerance = 1e-8;

  void validate() const;
};

struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;

  int num_variables() const { return static_cast<int>(f.size()); }
  // Throws std::invalid_argument on inconsistent dimensions or asymmetric H.
  void validate() const;
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIter };

std::string_view to_string(QpStatus status);

struct KktResiduals {
  double stationarity = 0.0;        // ||H s + f + A_eq' mu + A_in' lambda||_2
  double inequality_violation = 0.0;  // max(A_in s - b_in), clipped at 0
  double equality_violation = 0.0;  // ||A_eq s - b_eq||_inf
  double complementarity = 0.0;     // max |lambda_j (A_in s - b_in)_j|
  double min_dual = 0.0;            // min lambda_j (0 when there are none)

  double primal_violation() const { return std::max(inequality_violation, equality_violation); }
};

struct QpSolution {
  Eigen::VectorXd s_star;
  Eigen::VectorXd mu;      // equality multipliers
  Eigen::VectorXd lambda;  // inequality multipliers
  QpStatus status = QpStatus::kInfeasible;
  KktResiduals kkt;
  // For infeasible problems: violation of the constraint that could not be
  // satisfied when the dual iteration stopped.
  double infeasibility = 0.0;
  int iterations = 0;

  bool optimal() const { return status == QpStatus::kOptimal; }
};

// Null-space parameterization s = particular + null_basis * w of the affine set
// {s : A_eq s = b_eq}. The factorization only depends on A_eq, so callers that
// solve many problems with the same equality rows build it once.
class EqualityReduction {
 public:
  EqualityReduction() = default;
  EqualityReduction(const Eigen::MatrixXd& A_eq, const Eigen::VectorXd& b_eq,
                    double tolerance = 1e-10);

  int num_variables() const { return static_cast<int>(null_basis_.rows()); }
  int rank() const { return rank_; }
  bool consistent() const { return consistent_; }
  double consistency_residual() const { return consistency_residual_; }
  const Eigen::MatrixXd& null_basis() const { return null_basis_; }
  const Eigen::VectorXd& particular() const { return particular_; }

  // Least-squares mu with A_eq' mu = rhs; exact when rhs lies in range(A_eq').
  Eigen::VectorXd multipliers(const Eigen::VectorXd& rhs) const;

 private:
  int rank_ = 0;
  int num_rows_ = 0;
  bool consistent_ = true;
  double consistency_residual_ = 0.0;
  Eigen::MatrixXd range_basis_;  // Q1
  Eigen::MatrixXd null_basis_;   // Q2
  Eigen::MatrixXd r11_;
  Eigen::VectorXi permutation_;
  Eigen::VectorXd particular_;
};

namespace qp {

QpSolution solve(const QpProblem& problem, const SolverSettings& settings = {});
// Reuses a reduction built from problem.A_eq / problem.b_eq.
QpSolution solve(const QpProblem& problem, const EqualityReduction& reduction,
                 const SolverSettings& settings = {});

KktResiduals kkt_residual(const QpProblem& problem, const Eigen::VectorXd& primal,
                          const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda);

double objective(const QpProblem& problem, const Eigen::VectorXd& s);

}  // namespace qp
}  // namespace hypercog
