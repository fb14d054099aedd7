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

#include "hypercog/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace hypercog {

void NoiseSpec::validate() const {
  if (!(std >= 0.0)) throw std::invalid_argument("noise std must be non-negative");
}

Observation observe(const Strategy& truth, double std, Rng& rng) {
  NoiseSpec{std, 0}.validate();
  Observation obs;
  obs.s_hat = truth;
  obs.noise_std = std;
  for (int j = 1; j <= truth.segment.num_steps(); ++j) {
    obs.s_hat.data(Strategy::state_offset(j)) += rng.normal(0.0, std);
  }
  return obs;
}

StagePlan StagePlan::of(const ScenarioConfig& config) {
  if (config.stage_boundaries.empty()) return StagePlan{{0, config.horizon - 1}};
  return StagePlan{config.stage_boundaries};
}

StagePlan StagePlan::uniform(int horizon, int count) {
  if (count < 1 || horizon - 1 < count) {
    throw std::invalid_argument("stage count must be in [1, horizon - 1]");
  }
  StagePlan plan;
  for (int t = 0; t <= count; ++t) {
    plan.boundaries.push_back(static_cast<int>(std::lround(
        static_cast<double>(t) * (horizon - 1) / count)));
  }
  return plan;
}

void StagePlan::validate(int horizon) const {
  if (boundaries.size() < 2) throw std::invalid_argument("stage plan needs at least one stage");
  if (boundaries.front() != 0 || boundaries.back() != horizon - 1) {
    throw std::invalid_argument("stage boundaries must start at 0 and end at horizon - 1");
  }
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) {
      throw std::invalid_argument("stage boundaries must be strictly increasing");
    }
  }
}

namespace {

int destination_lane(const BehaviorSpec& b) {
  return b.kind == BehaviorKind::kLaneChange ? b.target_lane : b.lane;
}

}  // namespace

SuccessCheck check_success(const SegmentSetup& setup, const Profile& executed, bool solves_ok,
                           double tolerance, bool require_destination) {
  if (executed.size() != setup.models.size()) {
    throw std::invalid_argument("check_success: one strategy per vehicle");
  }
  SuccessCheck out;
  out.solves_ok = solves_ok;
  out.max_keep_out = -std::numeric_limits<double>::infinity();
  const int n = setup.segment().num_steps();
  const LaneGeometry& lanes = setup.road.lanes;
  out.reached = true;
  for (std::size_t i = 0; i < executed.size(); ++i) {
    const PlayerModel& m = setup.models[i];
    const KeepOut ko = KeepOut::of(m.geometry);
    for (std::size_t j = 0; j < executed.size(); ++j) {
      if (i == j) continue;
      for (int k = 1; k <= n; ++k) {
        out.max_keep_out =
            std::max(out.max_keep_out, ko.value(executed[i].state(k), executed[j].position(k)));
      }
    }
    out.max_static_violation =
        std::max(out.max_static_violation,
                 constraints::assemble_static(m, setup.road).violation(executed[i].data));
    if (require_destination) {
      const int lane = destination_lane(m.behavior);
      const double lo = lanes.boundary_y(lane) - tolerance;
      const double hi = lanes.boundary_y(lane + 1) + tolerance;
      for (const auto& p : RectangleFootprint::at(executed[i].state(n), m.geometry).vertices) {
        if (p.y() < lo || p.y() > hi) out.reached = false;
      }
    }
  }
  if (!solves_ok) {
    out.cause = "a solve did not converge";
  } else if (out.max_keep_out > tolerance) {
    out.cause = "keep-out intrusion";
  } else if (out.max_static_violation > tolerance) {
    out.cause = "constraint violation";
  } else if (!out.reached) {
    out.cause = "destination lane not reached";
  }
  out.success = out.cause.empty();
  return out;
}

namespace harness {

namespace {

Eigen::VectorXd positions(const Strategy& s) {
  const int n = s.segment.num_steps();
  Eigen::VectorXd p(2 * n);
  for (int j = 1; j <= n; ++j) p.segment<2>(2 * (j - 1)) = s.position(j);
  return p;
}

void check_same_segment(const Strategy& a, const Strategy& b) {
  if (!(a.segment == b.segment) || a.data.size() != b.data.size()) {
    throw std::invalid_argument("metrics: strategies cover different segments");
  }
}

}  // namespace

double position_observation_error(const Strategy& observed, const Strategy& truth) {
  check_same_segment(observed, truth);
  return (positions(observed) - positions(truth)).norm() / truth.segment.num_points;
}

double trajectory_prediction_error(const Strategy& predicted, const Strategy& truth) {
  check_same_segment(predicted, truth);
  return (predicted.data - truth.data).norm() / truth.segment.num_points;
}

std::vector<double> step_position_errors(const Strategy& predicted, const Strategy& truth) {
  check_same_segment(predicted, truth);
  std::vector<double> out;
  for (int j = 1; j <= truth.segment.num_steps(); ++j) {
    out.push_back((predicted.position(j) - truth.position(j)).norm());
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs fn(i) for i in [0, count) on up to `threads` threads.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

InverseSettings inverse_settings(const ScenarioConfig& config, bool online) {
  InverseSettings s;
  s.kappa = online ? config.inverse.kappa_online : config.inverse.kappa_offline;
  s.omega_dist = online ? config.inverse.omega_dist : 0.0;
  s.bounds = config.theta_bounds;
  return s;
}

Profile executed_profile(const EquilibriumResult& plan, int hv_id, const Strategy& hv) {
  Profile out = plan.strategies;
  for (std::size_t i = 0; i < plan.ids.size(); ++i) {
    if (plan.ids[i] == hv_id) out[i] = hv;
  }
  return out;
}

// Fills the prediction metrics of `r` from s_0C against the truth s_0.
void prediction_metrics(MetricsRecord& r, const Strategy& s_0C, const Strategy& s_0) {
  r.trajectory_prediction_error = trajectory_prediction_error(s_0C, s_0);
  r.step_position_errors = step_position_errors(s_0C, s_0);
  double sum = 0.0;
  double mx = 0.0;
  for (double e : r.step_position_errors) {
    sum += e;
    mx = std::max(mx, e);
  }
  r.mean_step_position_error = r.step_position_errors.empty()
                                   ? 0.0
                                   : sum / static_cast<double>(r.step_position_errors.size());
  r.max_step_position_error = mx;
}

void record_success(MetricsRecord& r, const SuccessCheck& ok) {
  r.success = ok.success;
  r.success_cause = ok.cause;
  r.max_keep_out = ok.max_keep_out;
  r.max_static_violation = ok.max_static_violation;
}

void mark_failed(MetricsRecord& r, const std::string& cause) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.status = "error: " + cause;
  r.position_observation_error = nan;
  r.parameter_error = nan;
  r.prior_parameter_error = nan;
  r.trajectory_prediction_error = nan;
  r.mean_step_position_error = nan;
  r.max_step_position_error = nan;
  r.step_position_errors.clear();
  r.success = false;
  r.success_cause = cause;
}

struct OfflineTruth {
  SegmentSetup setup;
  Strategy s_0;
  std::string error;  // non-empty when the truth could not be generated
};

OfflineTruth offline_truth(const ScenarioConfig& config) {
  OfflineTruth out;
  out.setup = cognition::full_horizon(config);
  try {
    const GameSpec g = cognition::hv_subjective_game(out.setup, config, config.hv().theta_true);
    const EquilibriumResult truth = game::solve_games(g, config.solver);
    if (!truth.converged) out.error = "ground-truth game did not converge";
    out.s_0 = truth.strategy(config.hv().id);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

MetricsRecord offline_repetition(const ScenarioConfig& config, const OfflineTruth& truth,
                                 double noise_std, int repetition, Rng& rng,
                                 netsim::Transport transport) {
  MetricsRecord r;
  r.experiment = "offline";
  r.repetition = repetition;
  r.noise_std = noise_std;
  if (!truth.error.empty()) {
    mark_failed(r, truth.error);
    return r;
  }
  const VehicleConfig& hv = config.hv();
  try {
    const Observation obs = observe(truth.s_0, noise_std, rng);
    r.position_observation_error = position_observation_error(obs.s_hat, truth.s_0);

    auto t0 = Clock::now();
    const InverseResult learned = inverse::interpret_offline(
        obs, truth.setup, config, inverse_settings(config, false), config.solver, transport);
    r.interpret_seconds = seconds_since(t0);
    r.parameter_error = inverse::parameter_error(learned.theta_0C.theta, hv.theta_true.theta,
                                                 hv.behavior.kind);
    r.prior_parameter_error = r.parameter_error;
    r.low_identifiability = learned.low_identifiability;
    r.sigma_min = learned.sigma_min;
    r.num_active = learned.num_active;

    t0 = Clock::now();
    const CognitionModel pred =
        cognition::predict_hv(truth.setup, config, learned.theta_0C, config.solver, transport);
    r.predict_seconds = seconds_since(t0);
    r.prediction_iterations = pred.equilibrium.iterations;
    prediction_metrics(r, pred.s_0C, truth.s_0);

    t0 = Clock::now();
    const CavPlan plan =
        cognition::plan_cavs(truth.setup, config, pred.s_0C, config.solver, transport);
    r.plan_seconds = seconds_since(t0);
    r.planning_iterations = plan.equilibrium.iterations;
    r.modeled_seconds = learned.trace.modeled_seconds() + pred.trace.modeled_seconds() +
                        plan.trace.modeled_seconds();

    const SuccessCheck ok = check_success(
        truth.setup, executed_profile(plan.equilibrium, hv.id, truth.s_0), plan.ok());
    record_success(r, ok);
  } catch (const std::exception& e) {
    mark_failed(r, e.what());
  }
  return r;
}

auto record_key(const MetricsRecord& r) {
  return std::tie(r.experiment, r.mode, r.noise_std, r.repetition, r.stage);
}

void sort_records(std::vector<MetricsRecord>& records) {
  std::sort(records.begin(), records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
    return record_key(a) < record_key(b);
  });
}

void check_options(const RunOptions& options) {
  if (options.repetitions < 0) throw std::invalid_argument("repetitions must be non-negative");
}

}  // namespace

std::vector<MetricsRecord> run_offline_experiment(const ScenarioConfig& config,
                                                  const std::vector<double>& noise_stds,
                                                  const RunOptions& options) {
  check_options(options);
  for (double s : noise_stds) NoiseSpec{s, options.seed}.validate();
  const OfflineTruth truth = offline_truth(config);
  const int reps = options.repetitions;
  const int total = static_cast<int>(noise_stds.size()) * reps;
  std::vector<MetricsRecord> out(static_cast<std::size_t>(total));
  parallel_for(total, options.threads, [&](int i) {
    const int level = i / reps;
    const int rep = i % reps;
    // Substreams are shared across noise levels so that level changes only
    // rescale the same draws.
    Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(rep));
    out[static_cast<std::size_t>(i)] = offline_repetition(
        config, truth, noise_stds[static_cast<std::size_t>(level)], rep, rng, options.transport);
  });
  sort_records(out);
  return out;
}

namespace {

constexpr int kReferenceMargin = 40;

struct OnlineStage {
  MetricsRecord record;
  TimingRecord timing;
};

std::vector<OnlineStage> online_repetition(const ScenarioConfig& config, const StagePlan& plan,
                                           int repetition, Rng& rng,
                                           netsim::Transport transport) {
  const VehicleConfig& hv = config.hv();
  const double noise = config.noise.std;
  const InverseSettings settings = inverse_settings(config, true);
  const auto full = cognition::full_references(config, kReferenceMargin);

  std::vector<const VehicleConfig*> vehicles;
  for (const auto& v : config.vehicles) vehicles.push_back(&v);
  std::sort(vehicles.begin(), vehicles.end(),
            [](const VehicleConfig* a, const VehicleConfig* b) { return a->id < b->id; });
  std::size_t hv_index = 0;
  std::vector<VehicleState> true_states;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    true_states.push_back(vehicles[i]->initial);
    if (vehicles[i]->id == hv.id) hv_index = i;
  }
  // The CAVs' view of the HV state at the current stage start.
  VehicleState hv_seen = hv.initial;
  StyleWeights estimate = style_weights_for(hv.behavior.kind, hv.style, config.theta_bounds);

  std::vector<OnlineStage> out;
  bool failed = false;
  for (int t = 1; t <= plan.count(); ++t) {
    OnlineStage st;
    MetricsRecord& r = st.record;
    r.experiment = "online";
    r.repetition = repetition;
    r.stage = t;
    r.noise_std = noise;
    st.timing.repetition = repetition;
    st.timing.stage = t;
    st.timing.transport = transport == netsim::Transport::kDistributed ? "distributed"
                                                                         : "centralized";
    if (failed) {
      mark_failed(r, "previous stage failed");
      out.push_back(std::move(st));
      continue;
    }
    try {
      const int k0 = plan.first(t);
      const int n = plan.num_points(t);
      r.prior_parameter_error =
          inverse::parameter_error(estimate.theta, hv.theta_true.theta, hv.behavior.kind);

      // The HV perceives the CAVs' positions with noise and plays its game.
      std::vector<VehicleState> hv_view = true_states;
      for (std::size_t i = 0; i < hv_view.size(); ++i) {
        if (i != hv_index) hv_view[i].px += rng.normal(0.0, noise);
      }
      const SegmentSetup hv_setup = cognition::stage(config, full, k0, n, hv_view);
      const EquilibriumResult hv_game = game::solve_games(
          cognition::hv_subjective_game(hv_setup, config, hv.theta_true), config.solver);
      if (!hv_game.converged || hv_game.degraded) {
        // Without a solution of its own game the HV's behavior is undefined.
        throw std::runtime_error("HV stage game has no solution");
      }
      const Strategy s_0 = hv_game.strategy(hv.id);

      std::vector<VehicleState> cav_view = true_states;
      cav_view[hv_index] = hv_seen;
      const SegmentSetup cav_setup = cognition::stage(config, full, k0, n, cav_view);

      auto t0 = Clock::now();
      const CognitionModel pred =
          cognition::predict_hv(cav_setup, config, estimate, config.solver, transport);
      r.predict_seconds = seconds_since(t0);
      r.prediction_iterations = pred.equilibrium.iterations;
      prediction_metrics(r, pred.s_0C, s_0);

      t0 = Clock::now();
      const CavPlan cav_plan =
          cognition::plan_cavs(cav_setup, config, pred.s_0C, config.solver, transport);
      r.plan_seconds = seconds_since(t0);
      r.planning_iterations = cav_plan.equilibrium.iterations;

      const Profile executed = executed_profile(cav_plan.equilibrium, hv.id, s_0);
      const SegmentSetup true_setup = cognition::stage(config, full, k0, n, true_states);
      const SuccessCheck ok = check_success(true_setup, executed, cav_plan.ok(), 1e-3,
                                            t == plan.count());
      record_success(r, ok);

      // Observe this stage and learn from it for the next one.
      const Observation obs = observe(s_0, noise, rng);
      r.position_observation_error = position_observation_error(obs.s_hat, s_0);
      t0 = Clock::now();
      const InverseResult learned = inverse::interpret_online(
          obs, estimate, cav_setup, config, settings, config.solver, 
          t >= config.inverse.conservative_from_stage, transport);
      r.interpret_seconds = seconds_since(t0);
      r.parameter_error = inverse::parameter_error(learned.theta_0C.theta, hv.theta_true.theta,
                                                   hv.behavior.kind);
      r.low_identifiability = learned.low_identifiability;
      r.sigma_min = learned.sigma_min;
      r.num_active = learned.num_active;

      const auto& traces = {&pred.trace, &cav_plan.trace, &learned.trace};
      for (const netsim::SessionTrace* tr : traces) {
        st.timing.modeled_seconds += tr->modeled_seconds();
        st.timing.compute_seconds += tr->total_compute_seconds();
        st.timing.messages += static_cast<int>(tr->messages.size());
      }
      st.timing.iterations = pred.equilibrium.iterations + cav_plan.equilibrium.iterations +
                             learned.cav_view.iterations;
      r.modeled_seconds = st.timing.modeled_seconds;
      st.timing.ok = true;

      estimate = learned.theta_0C;
      hv_seen = obs.s_hat.state(n - 1);
      for (std::size_t i = 0; i < executed.size(); ++i) true_states[i] = executed[i].state(n - 1);
    } catch (const std::exception& e) {
      mark_failed(r, e.what());
      failed = true;
    }
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<std::vector<OnlineStage>> online_runs(const ScenarioConfig& config,
                                                  const StagePlan& plan,
                                                  const RunOptions& options) {
  check_options(options);
  config.validate();
  plan.validate(config.horizon);
  std::vector<std::vector<OnlineStage>> runs(static_cast<std::size_t>(options.repetitions));
  parallel_for(options.repetitions, options.threads, [&](int rep) {
    Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(rep));
    runs[static_cast<std::size_t>(rep)] =
        online_repetition(config, plan, rep, rng, options.transport);
  });
  return runs;
}

}  // namespace

std::vector<MetricsRecord> run_online_experiment(const ScenarioConfig& config,
                                                 const StagePlan& plan,
                                                 const RunOptions& options) {
  std::vector<MetricsRecord> out;
  for (auto& run : online_runs(config, plan, options)) {
    for (auto& st : run) out.push_back(std::move(st.record));
  }
  sort_records(out);
  return out;
}

std::string_view to_string(SuccessMode mode) {
  return mode == SuccessMode::kWithInterpretation ? "with_interpretation" : "random_cognition";
}

SuccessMode parse_success_mode(std::string_view text) {
  if (text == "with_interpretation") return SuccessMode::kWithInterpretation;
  if (text == "random_cognition") return SuccessMode::kRandomCognition;
  throw std::invalid_argument("unknown success mode: " + std::string(text));
}

std::vector<MetricsRecord> run_success_rate(const ScenarioConfig& config, SuccessMode mode,
                                            const RunOptions& options, double max_angle) {
  check_options(options);
  if (!(max_angle >= 0.0)) throw std::invalid_argument("max_angle must be non-negative");
  const OfflineTruth truth = offline_truth(config);
  const VehicleConfig& hv = config.hv();
  std::vector<MetricsRecord> out(static_cast<std::size_t>(options.repetitions));
  parallel_for(options.repetitions, options.threads, [&](int rep) {
    Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(rep));
    MetricsRecord r;
    if (mode == SuccessMode::kWithInterpretation) {
      r = offline_repetition(config, truth, config.noise.std, rep, rng, options.transport);
    } else {
      r.repetition = rep;
      if (!truth.error.empty()) {
        mark_failed(r, truth.error);
      } else {
        try {
          const double angle = rng.uniform(-max_angle, max_angle);
          const StyleWeights guess = cognition::random_cognition(config, angle, rng);
          r.parameter_error =
              inverse::parameter_error(guess.theta, hv.theta_true.theta, hv.behavior.kind);
          r.prior_parameter_error = r.parameter_error;
          const auto t0 = Clock::now();
          netsim::SessionResult level1 = netsim::run(
              cognition::cav_level1_game(truth.setup, config, guess), config.solver,
              options.transport);
          r.plan_seconds = seconds_since(t0);
          r.planning_iterations = level1.result.iterations;
          r.modeled_seconds = level1.trace.modeled_seconds();
          prediction_metrics(r, level1.result.strategy(hv.id), truth.s_0);
          const SuccessCheck ok =
              check_success(truth.setup, executed_profile(level1.result, hv.id, truth.s_0),
                            level1.result.converged && !level1.result.degraded);
          record_success(r, ok);
        } catch (const std::exception& e) {
          mark_failed(r, e.what());
        }
      }
    }
    r.experiment = "success";
    r.mode = std::string(to_string(mode));
    out[static_cast<std::size_t>(rep)] = std::move(r);
  });
  sort_records(out);
  return out;
}

std::vector<SuccessBin> summarize_success(const std::vector<MetricsRecord>& records,
                                          double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bin width must be positive");
  std::vector<SuccessBin> bins;
  auto bin_for = [&](const std::string& mode, double lower, double upper) -> SuccessBin& {
    for (auto& b : bins) {
      if (b.mode == mode && b.lower == lower && b.upper == upper) return b;
    }
    bins.push_back(SuccessBin{mode, lower, upper, 0, 0});
    return bins.back();
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    SuccessBin& all = bin_for(r.mode, 0.0, inf);
    ++all.runs;
    all.successes += r.success ? 1 : 0;
    // Failed runs without a parameter error only count towards the overall row.
    if (!std::isfinite(r.parameter_error)) continue;
    const double idx = std::floor(r.parameter_error / width);
    SuccessBin& b = bin_for(r.mode, idx * width, (idx + 1.0) * width);
    ++b.runs;
    b.successes += r.success ? 1 : 0;
  }
  std::sort(bins.begin(), bins.end(), [](const SuccessBin& a, const SuccessBin& b) {
    return std::tie(a.mode, a.upper, a.lower) < std::tie(b.mode, b.upper, b.lower);
  });
  return bins;
}

std::vector<TimingRecord> run_timing(const ScenarioConfig& config, const StagePlan& plan,
                                     const RunOptions& options) {
  check_options(options);
  config.validate();
  plan.validate(config.horizon);
  std::vector<TimingRecord> out;
  // One thread, transports alternating per repetition, so that both modes see
  // the same cache and frequency conditions.
  for (int rep = 0; rep < options.repetitions; ++rep) {
    for (netsim::Transport transport :
         {netsim::Transport::kCentralized, netsim::Transport::kDistributed}) {
      Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(rep));
      for (auto& st : online_repetition(config, plan, rep, rng, transport)) {
        out.push_back(std::move(st.timing));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const TimingRecord& a, const TimingRecord& b) {
    return std::tie(a.transport, a.repetition, a.stage) <
           std::tie(b.transport, b.repetition, b.stage);
  });
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quoted(fields[i]);
  }
  out << '\n';
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "experiment",
      "mode",
      "noise_std",
      "repetition",
      "stage",
      "status",
      "position_observation_error",
      "parameter_error",
      "prior_parameter_error",
      "trajectory_prediction_error",
      "mean_step_position_error",
      "max_step_position_error",
      "low_identifiability",
      "sigma_min",
      "num_active",
      "success",
      "success_cause",
      "max_keep_out",
      "max_static_violation",
      "prediction_iterations",
      "planning_iterations",
      "interpret_seconds",
      "predict_seconds",
      "plan_seconds",
      "modeled_seconds",
  };
  return cols;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records,
                       const CsvOptions& options) {
  write_row(out, metrics_columns());
  auto wall = [&](double v) { return options.deterministic ? std::string() : fmt(v); };
  for (const auto& r : records) {
    write_row(out, {r.experiment, r.mode, fmt(r.noise_std), std::to_string(r.repetition),
                    std::to_string(r.stage), r.status, fmt(r.position_observation_error),
                    fmt(r.parameter_error), fmt(r.prior_parameter_error),
                    fmt(r.trajectory_prediction_error), fmt(r.mean_step_position_error),
                    fmt(r.max_step_position_error), r.low_identifiability ? "1" : "0",
                    fmt(r.sigma_min), std::to_string(r.num_active), r.success ? "1" : "0",
                    r.success_cause, fmt(r.max_keep_out), fmt(r.max_static_violation),
                    std::to_string(r.prediction_iterations),
                    std::to_string(r.planning_iterations), wall(r.interpret_seconds),
                    wall(r.predict_seconds), wall(r.plan_seconds), wall(r.modeled_seconds)});
  }
}

void write_step_errors_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  write_row(out, {"experiment", "mode", "noise_std", "repetition", "stage", "step", "error"});
  for (const auto& r : records) {
    for (std::size_t k = 0; k < r.step_position_errors.size(); ++k) {
      write_row(out, {r.experiment, r.mode, fmt(r.noise_std), std::to_string(r.repetition),
                      std::to_string(r.stage), std::to_string(k + 1),
                      fmt(r.step_position_errors[k])});
    }
  }
}

void write_success_csv(std::ostream& out, const std::vector<SuccessBin>& bins) {
  write_row(out, {"mode", "error_lower", "error_upper", "runs", "successes", "rate"});
  for (const auto& b : bins) {
    write_row(out, {b.mode, fmt(b.lower), fmt(b.upper), std::to_string(b.runs),
                    std::to_string(b.successes), fmt(b.rate())});
  }
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRecord>& records,
                      const CsvOptions& options) {
  write_row(out, {"transport", "repetition", "stage", "ok", "modeled_seconds", "compute_seconds",
                  "iterations", "messages"});
  auto wall = [&](double v) { return options.deterministic ? std::string() : fmt(v); };
  for (const auto& r : records) {
    write_row(out, {r.transport, std::to_string(r.repetition), std::to_string(r.stage),
                    r.ok ? "1" : "0", wall(r.modeled_seconds), wall(r.compute_seconds),
                    std::to_string(r.iterations), std::to_string(r.messages)});
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(),
                                      values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace harness
}  // namespace hypercog
