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

// Acceptance run: one PASS/FAIL line per criterion, exit code 1 when any
// criterion fails. `acceptance 3 7` runs only criteria 3 and 7.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hypercog/harness.hpp"
#include "oracles.hpp"

namespace {

using namespace hypercog;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::vector<double> collect(const std::vector<MetricsRecord>& rows,
                            const std::function<bool(const MetricsRecord&)>& keep,
                            double MetricsRecord::*field) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (keep(r)) out.push_back(r.*field);
  }
  return out;
}

bool ok(const MetricsRecord& r) { return r.status == "ok"; }

Outcome qp_oracle() {
  Stopwatch clock;
  Rng rng(20260101);
  int mismatches = 0;
  int not_optimal = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const QpProblem p = oracle::random_qp(rng);
    const QpSolution s = qp::solve(p);
    const auto ref = oracle::enumerate_active_sets(p);
    if (!s.optimal() || !ref) {
      ++not_optimal;
      continue;
    }
    const double d = (s.s_star - *ref).cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
    if (d > 1e-6) ++mismatches;
  }
  const double t = clock.seconds();
  return {mismatches == 0 && not_optimal == 0 && t < 10.0,
          format("1000 QPs, max |s - s_enum| %.2e, mismatches %d, not optimal %d, %.2f s", worst,
                 mismatches, not_optimal, t)};
}

Outcome dynamics_jacobian() {
  Rng rng(20260102);
  const VehicleGeometry geom;
  const double ts = 0.1;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto [x0, u0] = oracle::random_nominal(rng);
    const LinearizedStep lin = dynamics::linearize_discrete(x0, u0, geom, ts);
    Eigen::VectorXd z(6);
    z << x0.vector(), u0.vector();
    const auto step = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
      const VehicleState x = VehicleState::from_vector(w.head<4>());
      return dynamics::euler_step(x, ControlInput{w(4), w(5)}, geom, ts).vector();
    };
    const Eigen::MatrixXd J = oracle::central_jacobian(step, z, 1e-6);
    worst = std::max(worst, (J.leftCols(4) - lin.A).cwiseAbs().maxCoeff());
    worst = std::max(worst, (J.rightCols(2) - lin.B).cwiseAbs().maxCoeff());
    // Exact at the nominal point.
    const Vec4 next = dynamics::euler_step(x0, u0, geom, ts).vector();
    worst = std::max(worst, (lin.apply(x0.vector(), u0.vector()) - next).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, format("100 nominal points, max abs deviation %.2e", worst)};
}

Outcome monotonicity() {
  Rng rng(20260103);
  const ThetaBounds bounds;
  int violations = 0;
  double worst_low = std::numeric_limits<double>::infinity();
  double worst_high = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000; ++i) {
    const int players = 1 + static_cast<int>(rng.uniform() * 4);
    const Segment seg{0, 2 + static_cast<int>(rng.uniform() * 10)};
    std::vector<Eigen::VectorXd> s(players), s2(players);
    std::vector<Theta> theta(players);
    std::vector<ReferenceTrajectory> refs(players);
    for (int p = 0; p < players; ++p) {
      s[p].resize(seg.strategy_size());
      s2[p].resize(seg.strategy_size());
      for (int k = 0; k < seg.strategy_size(); ++k) {
        s[p](k) = rng.normal(0.0, 10.0);
        s2[p](k) = rng.normal(0.0, 10.0);
      }
      for (int c = 0; c < 6; ++c) theta[p](c) = rng.uniform(bounds.min, bounds.max);
      refs[p].first_step = 0;
      for (int k = 0; k < seg.num_points; ++k) {
        refs[p].states.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
      }
    }
    const Eigen::VectorXd g = game::pseudo_gradient(s, theta, refs);
    const Eigen::VectorXd g2 = game::pseudo_gradient(s2, theta, refs);
    Eigen::VectorXd ds(g.size());
    int at = 0;
    for (int p = 0; p < players; ++p) {
      ds.segment(at, s[p].size()) = s[p] - s2[p];
      at += static_cast<int>(s[p].size());
    }
    const double inner = (g - g2).dot(ds);
    const double sq = ds.squaredNorm();
    // Only floating-point rounding of the sums is allowed for.
    const double round = 1e-12 * bounds.max * sq;
    if (inner < bounds.min * sq - round || inner > bounds.max * sq + round) ++violations;
    worst_low = std::min(worst_low, inner / sq);
    worst_high = std::max(worst_high, inner / sq);
  }
  return {violations == 0,
          format("1000 draws, <dJ, ds>/|ds|^2 in [%.4g, %.4g] vs [%.4g, %.4g], violations %d",
                 worst_low, worst_high, bounds.min, bounds.max, violations)};
}

Outcome forward_game() {
  const ScenarioConfig config = scenario::offline_lane_change_config();
  const SegmentSetup setup = cognition::full_horizon(config);
  const GameSpec g = cognition::true_game(setup, config);
  Stopwatch clock;
  const EquilibriumResult r = game::solve_games(g, config.solver);
  const double t = clock.seconds();
  double worst_ratio = 0.0;
  bool gaps_ok = true;
  for (std::size_t i = 0; i < r.ids.size(); ++i) {
    const double bound = 1e-4 * (1.0 + std::abs(r.objectives[i]));
    worst_ratio = std::max(worst_ratio, r.gaps[i] / bound);
    if (!(r.gaps[i] <= bound)) gaps_ok = false;
  }
  const bool pass = r.converged && !r.degraded && r.iterations <= config.solver.max_iterations &&
                    r.max_violation <= 1e-3 && gaps_ok && t <= 60.0 &&
                    static_cast<int>(r.ids.size()) == 4 && config.horizon == 36;
  return {pass, format("%d vehicles, T %d, converged %d in %d sweeps, max violation %.2e, "
                       "max gap / bound %.2e, %.2f s",
                       static_cast<int>(r.ids.size()), config.horizon, r.converged, r.iterations,
                       r.max_violation, worst_ratio, t)};
}

// Built-in offline scenario with every vehicle's initial p_x and speed drawn
// around the configured values.
ScenarioConfig perturbed_scenario(Rng& rng) {
  for (;;) {
    ScenarioConfig c = scenario::offline_lane_change_config();
    for (auto& v : c.vehicles) {
      v.initial.px += rng.uniform(-3.0, 3.0);
      v.initial.v = std::clamp(v.initial.v + rng.uniform(-1.5, 1.5), 0.5, 19.5);
    }
    try {
      c.validate();
      cognition::full_horizon(c);
      return c;
    } catch (const std::exception&) {
      // Lane change no longer fits the horizon; draw again.
    }
  }
}

Outcome transport_transparency() {
  Rng rng(20260105);
  int identical = 0;
  int converged = 0;
  for (int i = 0; i < 20; ++i) {
    const ScenarioConfig config = perturbed_scenario(rng);
    const GameSpec g = cognition::true_game(cognition::full_horizon(config), config);
    const auto a = netsim::run(g, config.solver, netsim::Transport::kDistributed);
    const auto b = netsim::run(g, config.solver, netsim::Transport::kCentralized);
    bool same = a.result.iterations == b.result.iterations &&
                a.result.strategies.size() == b.result.strategies.size();
    for (std::size_t p = 0; same && p < a.result.strategies.size(); ++p) {
      const auto& x = a.result.strategies[p].data;
      const auto& y = b.result.strategies[p].data;
      same = x.size() == y.size() &&
             std::equal(x.data(), x.data() + x.size(), y.data(),
                        [](double u, double w) { return std::memcmp(&u, &w, sizeof u) == 0; });
    }
    if (same) ++identical;
    if (a.result.converged) ++converged;
  }
  return {identical == 20,
          format("20 scenarios, bitwise identical %d, converged %d", identical, converged)};
}

Outcome offline_round_trip() {
  const ScenarioConfig config = scenario::offline_lane_change_config();
  RunOptions o;
  o.seed = 6;
  o.repetitions = 1;
  const auto clean = harness::run_offline_experiment(config, {0.0}, o);
  o.repetitions = 50;
  const auto noisy = harness::run_offline_experiment(config, {0.05}, o);
  const MetricsRecord& c = clean.front();
  const auto traj = collect(noisy, ok, &MetricsRecord::trajectory_prediction_error);
  const auto obs = collect(noisy, ok, &MetricsRecord::position_observation_error);
  const double mt = harness::median(traj);
  const double mo = harness::median(obs);
  const bool pass = ok(c) && c.parameter_error <= 0.05 && c.mean_step_position_error <= 0.02 &&
                    traj.size() == 50 && mt < mo;
  return {pass, format("noise-free: parameter error %.4f, mean step position error %.4f m; "
                       "std 0.05 x %d reps: median trajectory error %.5f vs median observation "
                       "error %.5f",
                       c.parameter_error, c.mean_step_position_error,
                       static_cast<int>(traj.size()), mt, mo)};
}

Outcome offline_sweep() {
  const ScenarioConfig config = scenario::offline_lane_change_config();
  RunOptions o;
  o.seed = 7;
  o.repetitions = 50;
  Stopwatch clock;
  const std::vector<double> stds{0.05, 0.10, 0.20, 0.40};
  const auto rows = harness::run_offline_experiment(config, stds, o);
  const double t = clock.seconds();
  std::vector<double> medians;
  int failed = 0;
  for (double s : stds) {
    const auto perr = collect(
        rows, [&](const MetricsRecord& r) { return ok(r) && r.noise_std == s; },
        &MetricsRecord::parameter_error);
    failed += 50 - static_cast<int>(perr.size());
    medians.push_back(harness::median(perr));
  }
  const bool monotone = std::is_sorted(medians.begin(), medians.end());
  const bool pass = monotone && medians.back() <= 0.25 && failed == 0 && t <= 1800.0;
  return {pass, format("median parameter error %.4f, %.4f, %.4f, %.4f at std 0.05, 0.1, 0.2, "
                       "0.4; failed reps %d; %.1f s",
                       medians[0], medians[1], medians[2], medians[3], failed, t)};
}

Outcome online_replication() {
  const ScenarioConfig config = scenario::online_lane_change_config();
  const StagePlan plan = StagePlan::of(config);
  const double duration = (plan.boundaries.back() - plan.boundaries.front()) * config.ts;
  const bool setup_ok = plan.count() == 5 && std::abs(duration - 6.0) < 1e-9 &&
                        config.noise.std == 0.05 && config.inverse.kappa_online == 0.3 &&
                        config.inverse.omega_dist == 1.0;
  RunOptions o;
  o.seed = 8;
  o.repetitions = 50;
  const auto rows = harness::run_online_experiment(config, plan, o);
  int stage1 = 0;
  int stage1_flagged = 0;
  int failed_reps = 0;
  std::set<int> failed;
  for (const auto& r : rows) {
    if (!ok(r)) failed.insert(r.repetition);
    if (r.stage == 1 && ok(r)) {
      ++stage1;
      if (r.low_identifiability) ++stage1_flagged;
    }
  }
  failed_reps = static_cast<int>(failed.size());
  bool medians_ok = true;
  std::string per_stage;
  for (int t = 2; t <= plan.count(); ++t) {
    const auto perr = collect(
        rows, [&](const MetricsRecord& r) { return ok(r) && r.stage == t; },
        &MetricsRecord::parameter_error);
    const double m = harness::median(perr);
    if (perr.empty() || !(m <= 0.04)) medians_ok = false;
    per_stage += format(" %d:%.4f(n=%d)", t, m, static_cast<int>(perr.size()));
  }
  const bool pass = setup_ok && stage1 > 0 && stage1_flagged == stage1 && medians_ok;
  return {pass, format("stage 1 flagged %d/%d; median parameter error by stage%s; "
                       "repetitions with a failed stage %d/50",
                       stage1_flagged, stage1, per_stage.c_str(), failed_reps)};
}

Outcome success_contrast() {
  const ScenarioConfig config = scenario::offline_lane_change_config();
  RunOptions o;
  o.seed = 9;
  o.repetitions = 100;
  auto rows = harness::run_success_rate(config, harness::SuccessMode::kWithInterpretation, o);
  o.repetitions = 1000;
  const auto random = harness::run_success_rate(config, harness::SuccessMode::kRandomCognition, o);
  rows.insert(rows.end(), random.begin(), random.end());
  const auto bins = harness::summarize_success(rows);
  double with = 0.0;
  double without = 0.0;
  int with_runs = 0;
  int without_runs = 0;
  std::string per_bin;
  for (const auto& b : bins) {
    const bool overall = std::isinf(b.upper);
    if (overall && b.mode == "with_interpretation") {
      with = b.rate();
      with_runs = b.runs;
    } else if (overall) {
      without = b.rate();
      without_runs = b.runs;
    } else if (b.mode == "random_cognition") {
      per_bin += format(" [%.1f,%.1f):%d/%d", b.lower, b.upper, b.successes, b.runs);
    }
  }
  const bool pass = with_runs >= 100 && with == 1.0 && without_runs == 1000 && without < with;
  return {pass, format("with_interpretation %.3f over %d; random_cognition %.3f over %d; "
                       "random by error bin%s",
                       with, with_runs, without, without_runs, per_bin.c_str())};
}

Outcome hypergame_collapse() {
  const ScenarioConfig config = scenario::offline_lane_change_config();
  const ProbeResult probe =
      cognition::misperception_gap_probe(config, {1.0, 0.75, 0.5, 0.25, 0.0}, config.solver);
  double gap_at_zero = std::numeric_limits<double>::infinity();
  std::string table;
  bool all_converged = true;
  for (const auto& row : probe.rows) {
    if (row.cognitive_threshold == 0.0) gap_at_zero = row.hv_gap;
    all_converged = all_converged && row.converged;
    table += format(" (%.3f, %.2e)", row.cognitive_threshold, row.hv_gap);
  }
  const bool trend = gap_at_zero <= 1e-4 && probe.monotone && std::isfinite(probe.slope) &&
                     probe.slope > 0.0 && all_converged && probe.rows.size() == 5;

  RunOptions o;
  o.seed = 10;
  o.repetitions = 10;
  const StagePlan plan = StagePlan::of(scenario::online_lane_change_config());
  const auto timing = harness::run_timing(scenario::online_lane_change_config(), plan, o);
  bool ordered = true;
  std::string times;
  for (int t = 1; t <= plan.count(); ++t) {
    std::map<std::string, std::vector<double>> by;
    for (const auto& r : timing) {
      if (r.stage == t && r.ok) by[r.transport].push_back(r.modeled_seconds);
    }
    const double d = harness::median(by["distributed"]);
    const double c = harness::median(by["centralized"]);
    if (by["distributed"].empty() || by["centralized"].empty() || !(d <= c)) ordered = false;
    times += format(" %d:%.4f/%.4f", t, d, c);
  }
  return {trend && ordered,
          format("(eps_c, HV gap):%s; slope %.3e, monotone %d; median modeled s "
                 "distributed/centralized by stage%s",
                 table.c_str(), probe.slope, probe.monotone, times.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"QP oracle equivalence", qp_oracle},
      {"dynamics Jacobian check", dynamics_jacobian},
      {"pseudo-gradient monotonicity and Lipschitz bound", monotonicity},
      {"forward game quality", forward_game},
      {"transport transparency", transport_transparency},
      {"offline round trip", offline_round_trip},
      {"offline sweep shape", offline_sweep},
      {"online replication", online_replication},
      {"success-rate contrast", success_contrast},
      {"hypergame collapse, probe trend and timing order", hypergame_collapse},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    Outcome out;
    Stopwatch clock;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("criterion %2d %s: %s (%.1f s): %s\n", n, out.pass ? "PASS" : "FAIL",
                criteria[i].first, clock.seconds(), out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
