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

#include "hypercog/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypercog {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SolverSettings::validate() const {
  if (!(constraint_violation_threshold > 0.0)) {
    throw std::invalid_argument("constraint_violation_threshold must be positive");
  }
  if (!(relative_step_progress > 0.0)) {
    throw std::invalid_argument("relative_step_progress must be positive");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(qp_tolerance > 0.0)) throw std::invalid_argument("qp_tolerance must be positive");
}

void QpProblem::validate() const {
  const auto n = f.size();
  if (H.rows() != n || H.cols() != n) throw std::invalid_argument("H must be n x n");
  if (A_eq.rows() != b_eq.size() || (A_eq.rows() > 0 && A_eq.cols() != n)) {
    throw std::invalid_argument("A_eq / b_eq dimensions are inconsistent");
  }
  if (A_in.rows() != b_in.size() || (A_in.rows() > 0 && A_in.cols() != n)) {
    throw std::invalid_argument("A_in / b_in dimensions are inconsistent");
  }
  const double scale = 1.0 + H.cwiseAbs().maxCoeff();
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("H must be symmetric");
  }
}

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal:
      return "optimal";
    case QpStatus::kInfeasible:
      return "infeasible";
    case QpStatus::kMaxIter:
      return "max_iter";
  }
  return "unknown";
}

EqualityReduction::EqualityReduction(const MatrixXd& A_eq, const VectorXd& b_eq,
                                     double tolerance) {
  const int n = static_cast<int>(A_eq.cols());
  num_rows_ = static_cast<int>(A_eq.rows());
  if (b_eq.size() != num_rows_) throw std::invalid_argument("A_eq / b_eq size mismatch");
  if (num_rows_ == 0) {
    null_basis_ = MatrixXd::Identity(n, n);
    range_basis_.resize(n, 0);
    particular_ = VectorXd::Zero(n);
    permutation_ = Eigen::VectorXi::Zero(0);
    return;
  }

  Eigen::ColPivHouseholderQR<MatrixXd> qr(A_eq.transpose());
  qr.setThreshold(tolerance);
  rank_ = static_cast<int>(qr.rank());
  const MatrixXd Q = qr.householderQ();
  range_basis_ = Q.leftCols(rank_);
  null_basis_ = Q.rightCols(n - rank_);
  r11_ = qr.matrixR().topLeftCorner(rank_, rank_).triangularView<Eigen::Upper>();
  permutation_ = qr.colsPermutation().indices();

  // A_eq' P = Q R, so A_eq s = b  <=>  R' Q' s = P' b.
  const VectorXd pb = qr.colsPermutation().transpose() * b_eq;
  const VectorXd y =
      r11_.transpose().triangularView<Eigen::Lower>().solve(pb.head(rank_));
  particular_ = range_basis_ * y;
  consistency_residual_ = (A_eq * particular_ - b_eq).lpNorm<Eigen::Infinity>();
  consistent_ = consistency_residual_ <= 1e-8 * (1.0 + b_eq.lpNorm<Eigen::Infinity>());
}

VectorXd EqualityReduction::multipliers(const VectorXd& rhs) const {
  VectorXd mu = VectorXd::Zero(num_rows_);
  if (num_rows_ == 0 || rank_ == 0) return mu;
  // Q R P' mu = rhs; the non-pivot part of P' mu is set to zero.
  const VectorXd head =
      r11_.triangularView<Eigen::Upper>().solve(range_basis_.transpose() * rhs);
  for (int i = 0; i < rank_; ++i) mu(permutation_(i)) = head(i);
  return mu;
}

namespace qp {
namespace {

// Goldfarb-Idnani dual active-set method for
//   min 1/2 x' G x + a' x   s.t.  N' x >= b
// with unit-norm columns of N. J = L^-T Q and R are the factors of the
// active-set matrix: J' N_active = [R; 0].
class DualActiveSet {
 public:
  DualActiveSet(const MatrixXd& G, const VectorXd& a, const MatrixXd& N, const VectorXd& b,
                double tolerance, int max_steps)
      : N_(N), b_(b), tol_(tolerance), max_steps_(max_steps) {
    n_ = static_cast<int>(G.rows());
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("Hessian is not positive definite on the equality null space");
    }
    const MatrixXd L = llt.matrixL();
    J_ = L.transpose().triangularView<Eigen::Upper>().solve(MatrixXd::Identity(n_, n_));
    R_ = MatrixXd::Zero(n_, n_);
    x_ = -llt.solve(a);
    active_.reserve(n_);
    u_.reserve(n_);
  }

  QpStatus run() {
    const int m = static_cast<int>(N_.cols());
    std::vector<char> is_active(m, 0);
    for (;;) {
      int p = -1;
      double worst = 0.0;
      for (int j = 0; j < m; ++j) {
        if (is_active[j]) continue;
        const double slack = N_.col(j).dot(x_) - b_(j);
        if (slack < -tol_ * (1.0 + std::abs(b_(j))) && slack < worst) {
          worst = slack;
          p = j;
        }
      }
      if (p < 0) return QpStatus::kOptimal;

      const VectorXd np = N_.col(p);
      double slack_p = worst;
      double u_plus = 0.0;
      for (;;) {
        if (++steps_ > max_steps_) return QpStatus::kMaxIter;
        const int q = static_cast<int>(active_.size());
        VectorXd d = J_.transpose() * np;
        const VectorXd z = J_.rightCols(n_ - q) * d.tail(n_ - q);
        VectorXd r(q);
        if (q > 0) {
          r = R_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));
        }

        const double inf = std::numeric_limits<double>::infinity();
        double t1 = inf;
        int drop = -1;
        for (int k = 0; k < q; ++k) {
          if (r(k) > 0.0 && u_[k] / r(k) < t1) {
            t1 = u_[k] / r(k);
            drop = k;
          }
        }
        double t2 = inf;
        if (z.squaredNorm() > std::numeric_limits<double>::epsilon()) {
          const double zn = z.dot(np);
          if (zn > 0.0) t2 = -slack_p / zn;
        }
        const double t = std::min(t1, t2);
        if (t == inf) {
          infeasibility_ = -slack_p;
          return QpStatus::kInfeasible;
        }

        for (int k = 0; k < q; ++k) u_[k] -= t * r(k);
        u_plus += t;
        if (t2 == inf) {
          remove(drop, is_active);
          continue;
        }
        x_ += t * z;
        if (t == t2) {
          if (!add(p, d, u_plus)) {
            // Numerically dependent on the active set: treat as satisfied.
            is_active[p] = 1;
            excluded_.push_back(p);
          } else {
            is_active[p] = 1;
          }
          break;
        }
        remove(drop, is_active);
        slack_p = np.dot(x_) - b_(p);
      }
    }
  }

  const VectorXd& x() const { return x_; }
  double infeasibility() const { return infeasibility_; }
  int steps() const { return steps_; }

  VectorXd duals() const {
    VectorXd lambda = VectorXd::Zero(N_.cols());
    for (std::size_t k = 0; k < active_.size(); ++k) lambda(active_[k]) = u_[k];
    return lambda;
  }

 private:
  bool add(int p, VectorXd& d, double u_plus) {
    const int q = static_cast<int>(active_.size());
    for (int j = n_ - 1; j > q; --j) {
      const double h = std::hypot(d(j - 1), d(j));
      if (h == 0.0) continue;
      const double c = d(j - 1) / h;
      const double s = d(j) / h;
      d(j - 1) = h;
      d(j) = 0.0;
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j - 1);
        const double t2 = J_(k, j);
        J_(k, j - 1) = c * t1 + s * t2;
        J_(k, j) = -s * t1 + c * t2;
      }
    }
    const double r_norm = std::max(1.0, R_.topLeftCorner(q, q).diagonal().cwiseAbs().maxCoeff());
    if (std::abs(d(q)) <= std::numeric_limits<double>::epsilon() * r_norm) return false;
    R_.col(q).head(q + 1) = d.head(q + 1);
    active_.push_back(p);
    u_.push_back(u_plus);
    return true;
  }

  void remove(int position, std::vector<char>& is_active) {
    is_active[active_[position]] = 0;
    const int q = static_cast<int>(active_.size());
    for (int k = position; k + 1 < q; ++k) {
      active_[k] = active_[k + 1];
      u_[k] = u_[k + 1];
      R_.col(k) = R_.col(k + 1);
    }
    active_.pop_back();
    u_.pop_back();
    R_.col(q - 1).setZero();
    const int nq = q - 1;
    for (int j = position; j < nq; ++j) {
      const double h = std::hypot(R_(j, j), R_(j + 1, j));
      if (h == 0.0) continue;
      const double c = R_(j, j) / h;
      const double s = R_(j + 1, j) / h;
      R_(j, j) = h;
      R_(j + 1, j) = 0.0;
      for (int k = j + 1; k < nq; ++k) {
        const double t1 = R_(j, k);
        const double t2 = R_(j + 1, k);
        R_(j, k) = c * t1 + s * t2;
        R_(j + 1, k) = -s * t1 + c * t2;
      }
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j);
        const double t2 = J_(k, j + 1);
        J_(k, j) = c * t1 + s * t2;
        J_(k, j + 1) = -s * t1 + c * t2;
      }
    }
    // Constraints dropped for dependence may be addable again.
    for (int e : excluded_) is_active[e] = 0;
    excluded_.clear();
  }

  const MatrixXd& N_;
  const VectorXd& b_;
  double tol_;
  int max_steps_;
  int n_ = 0;
  MatrixXd J_;
  MatrixXd R_;
  VectorXd x_;
  std::vector<int> active_;
  std::vector<double> u_;
  std::vector<int> excluded_;
  double infeasibility_ = 0.0;
  int steps_ = 0;
};

}  // namespace

double objective(const QpProblem& problem, const VectorXd& s) {
  return 0.5 * s.dot(problem.H * s) + problem.f.dot(s);
}

KktResiduals kkt_residual(const QpProblem& problem, const VectorXd& primal, const VectorXd& mu,
                          const VectorXd& lambda) {
  KktResiduals res;
  VectorXd grad = problem.H * primal + problem.f;
  if (problem.A_eq.rows() > 0) {
    grad += problem.A_eq.transpose() * mu;
    res.equality_violation = (problem.A_eq * primal - problem.b_eq).lpNorm<Eigen::Infinity>();
  }
  if (problem.A_in.rows() > 0) {
    grad += problem.A_in.transpose() * lambda;
    const VectorXd g = problem.A_in * primal - problem.b_in;
    res.inequality_violation = std::max(0.0, g.maxCoeff());
    res.complementarity = lambda.cwiseProduct(g).cwiseAbs().maxCoeff();
    res.min_dual = lambda.minCoeff();
  }
  res.stationarity = grad.norm();
  return res;
}

QpSolution solve(const QpProblem& problem, const SolverSettings& settings) {
  problem.validate();
  return solve(problem, EqualityReduction(problem.A_eq, problem.b_eq), settings);
}

QpSolution solve(const QpProblem& problem, const EqualityReduction& reduction,
                 const SolverSettings& settings) {
  const int n = problem.num_variables();
  if (reduction.num_variables() != n) {
    throw std::invalid_argument("equality reduction does not match the problem size");
  }
  const int m_in = static_cast<int>(problem.A_in.rows());
  if (problem.b_in.size() != m_in || (m_in > 0 && problem.A_in.cols() != n)) {
    throw std::invalid_argument("A_in / b_in dimensions are inconsistent");
  }
  const double tol = settings.qp_tolerance;

  QpSolution sol;
  sol.lambda = VectorXd::Zero(m_in);
  sol.mu = VectorXd::Zero(problem.A_eq.rows());
  const VectorXd& sp = reduction.particular();
  const MatrixXd& Z = reduction.null_basis();
  if (!reduction.consistent()) {
    sol.s_star = sp;
    sol.status = QpStatus::kInfeasible;
    sol.infeasibility = reduction.consistency_residual();
    sol.kkt = kkt_residual(problem, sol.s_star, sol.mu, sol.lambda);
    return sol;
  }

  // Reduced inequalities C w <= d; rows whose image vanishes are checked at sp.
  const MatrixXd C = m_in > 0 ? MatrixXd(problem.A_in * Z) : MatrixXd(0, Z.cols());
  const VectorXd d = m_in > 0 ? VectorXd(problem.b_in - problem.A_in * sp) : VectorXd();
  std::vector<int> kept;
  std::vector<double> norms;
  for (int j = 0; j < m_in; ++j) {
    const double norm = C.row(j).norm();
    const double row_scale = 1.0 + problem.A_in.row(j).norm() * (1.0 + sp.norm());
    if (norm <= 1e-12 * row_scale) {
      if (-d(j) > tol * (1.0 + std::abs(problem.b_in(j)))) {
        sol.s_star = sp;
        sol.status = QpStatus::kInfeasible;
        sol.infeasibility = -d(j);
        sol.kkt = kkt_residual(problem, sol.s_star, sol.mu, sol.lambda);
        return sol;
      }
      continue;
    }
    kept.push_back(j);
    norms.push_back(norm);
  }

  const int nr = static_cast<int>(Z.cols());
  VectorXd w = VectorXd::Zero(nr);
  if (nr > 0) {
    const MatrixXd HZ = problem.H * Z;
    MatrixXd G = Z.transpose() * HZ;
    G = 0.5 * (G + G.transpose());
    const VectorXd a = Z.transpose() * (problem.H * sp + problem.f);
    MatrixXd N(nr, kept.size());
    VectorXd b(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      N.col(k) = -C.row(kept[k]).transpose() / norms[k];
      b(k) = -d(kept[k]) / norms[k];
    }
    const int max_steps = 10 * (nr + static_cast<int>(kept.size())) + 100;
    DualActiveSet solver(G, a, N, b, tol, max_steps);
    sol.status = solver.run();
    sol.iterations = solver.steps();
    sol.infeasibility = solver.infeasibility();
    w = solver.x();
    const VectorXd u = solver.duals();
    for (std::size_t k = 0; k < kept.size(); ++k) sol.lambda(kept[k]) = u(k) / norms[k];
  } else {
    sol.status = QpStatus::kOptimal;
    for (int j : kept) {
      if (-d(j) > tol * (1.0 + std::abs(problem.b_in(j)))) {
        sol.status = QpStatus::kInfeasible;
        sol.infeasibility = std::max(sol.infeasibility, -d(j));
      }
    }
  }

  sol.s_star = sp + Z * w;
  if (problem.A_eq.rows() > 0) {
    VectorXd grad = problem.H * sol.s_star + problem.f;
    if (m_in > 0) grad += problem.A_in.transpose() * sol.lambda;
    sol.mu = -reduction.multipliers(grad);
  }
  sol.kkt = kkt_residual(problem, sol.s_star, sol.mu, sol.lambda);
  return sol;
}

}  // namespace qp
}  // namespace hypercog
