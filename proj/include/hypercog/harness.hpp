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
// Experiment drivers: offline noise sweep, staged online run, success-rate
// study and centralized/distributed timing. Every driver returns plain
// records; the CSV writers fix the column order and print doubles with 17
// significant digits so equal seeds give equal bytes.
//
// Repetition r of a run seeded with s draws from Rng::substream(s, r), so
// results do not depend on how repetitions are scheduled over threads.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypercog/cognition.hpp"
#include "hypercog/inverse.hpp"
#include "hypercog/random.hpp"

namespace hypercog {

// Zero-mean Gaussian noise on p_x of every observed state.
struct NoiseSpec {
  double std = 0.0;  // m
  std::uint64_t seed = 0;

  void validate() const;
};

// Copy of `truth` with N(0, std^2) added to p_x of every state.
Observation observe(const Strategy& truth, double std, Rng& rng);

// Time-point boundaries k_0 < k_1 < ... < k_tau. Stage t (1-based) covers
// points k_{t-1} .. k_t; its first point is the state the stage starts from.
struct StagePlan {
  std::vector<int> boundaries;

  int count() const { return static_cast<int>(boundaries.size()) - 1; }
  int first(int t) const { return boundaries.at(t - 1); }
  int last(int t) const { return boundaries.at(t); }
  int num_points(int t) const { return last(t) - first(t) + 1; }

  // Boundaries of the config, or one stage over the horizon when it has none.
  static StagePlan of(const ScenarioConfig& config);
  // `count` stages of near-equal length over `horizon` points.
  static StagePlan uniform(int horizon, int count);
  // Strictly increasing, starts at 0, ends at horizon - 1.
  void validate(int horizon) const;
};

struct SuccessCheck {
  double max_keep_out = 0.0;       // largest 1 - (x/a)^6 - (y/b)^6 over ordered pairs
  double max_static_violation = 0.0;  // dynamics, boxes, lanes, behavior rows
  bool reached = false;            // final footprint inside the destination lane
  bool solves_ok = false;
  bool success = false;
  std::string cause;               // empty on success
};

// `executed` holds one strategy per vehicle, ascending id. Success means no
// keep-out intrusion or static-row violation beyond `tolerance`, every
// vehicle ending inside its destination lane (when `require_destination`),
// and `solves_ok`.
SuccessCheck check_success(const SegmentSetup& setup, const Profile& executed, bool solves_ok,
                           double tolerance = 1e-3, bool require_destination = true);

struct MetricsRecord {
  std::string experiment;  // offline, online, success
  std::string mode;        // with_interpretation, random_cognition or empty
  int repetition = 0;
  int stage = 0;  // 1-based for online runs, 0 otherwise
  double noise_std = 0.0;
  std::string status = "ok";  // "ok" or "error: <cause>"

  // (1/T) ||p_hat_0 - p_0||, T = points in the segment.
  double position_observation_error = 0.0;
  // Of the estimate learned from this record's observation.
  double parameter_error = 0.0;
  // Of the estimate the prediction used (online: learned in the previous stage).
  double prior_parameter_error = 0.0;
  // (1/T) ||s_0C - s_0||.
  double trajectory_prediction_error = 0.0;
  // ||p_0C(k) - p_0(k)|| for k = 1 .. N.
  std::vector<double> step_position_errors;
  double mean_step_position_error = 0.0;
  double max_step_position_error = 0.0;
  bool low_identifiability = false;
  double sigma_min = 0.0;
  int num_active = 0;
  bool success = false;
  std::string success_cause;
  double max_keep_out = 0.0;
  double max_static_violation = 0.0;
  int prediction_iterations = 0;
  int planning_iterations = 0;
  // Wall seconds per phase and modeled seconds of the CAV-side solves.
  double interpret_seconds = 0.0;
  double predict_seconds = 0.0;
  double plan_seconds = 0.0;
  double modeled_seconds = 0.0;
};

struct RunOptions {
  std::uint64_t seed = 1;
  int repetitions = 1;
  int threads = 1;
  netsim::Transport transport = netsim::Transport::kDistributed;
};

namespace harness {

// Metric formulas; T is the number of points of the strategies' segment.
// (1/T) ||p_observed - p_truth|| over the stacked positions of steps 1 .. N.
double position_observation_error(const Strategy& observed, const Strategy& truth);
// (1/T) ||s_predicted - s_truth|| over the whole strategy vector.
double trajectory_prediction_error(const Strategy& predicted, const Strategy& truth);
// ||p_predicted(k) - p_truth(k)|| for k = 1 .. N.
std::vector<double> step_position_errors(const Strategy& predicted, const Strategy& truth);

// Per repetition: truth from the HV's game, noisy observation,
// interpret_offline, predict_hv, plan_cavs. Failures become records with an
// error status. Rows sorted by (noise_std, repetition).
std::vector<MetricsRecord> run_offline_experiment(const ScenarioConfig& config,
                                                  const std::vector<double>& noise_stds,
                                                  const RunOptions& options);

// Staged replanning. Both sides observe p_x with noise config.noise.std; the
// CAVs exchange exact trajectories. The estimate for stage 1 is the HV's
// style-typical weights; afterwards it is learned from the previous stage,
// with the conservativeness term when learning from stage
// config.inverse.conservative_from_stage onward. Record t carries the
// estimate learned from stage t's observation.
// Rows sorted by (repetition, stage).
std::vector<MetricsRecord> run_online_experiment(const ScenarioConfig& config,
                                                 const StagePlan& plan,
                                                 const RunOptions& options);

enum class SuccessMode { kWithInterpretation, kRandomCognition };

std::string_view to_string(SuccessMode mode);
SuccessMode parse_success_mode(std::string_view text);

// with_interpretation runs the offline pipeline at config.noise.std.
// random_cognition draws the CAVs' estimate at a uniform angle in
// [-max_angle, max_angle] from the true effective weights and the CAVs
// execute their part of the level-1 game.
std::vector<MetricsRecord> run_success_rate(const ScenarioConfig& config, SuccessMode mode,
                                            const RunOptions& options,
                                            double max_angle = 0.7853981633974483);

struct SuccessBin {
  std::string mode;
  double lower = 0.0;  // parameter error, inclusive
  double upper = 0.0;  // exclusive; +inf for the overall row
  int runs = 0;
  int successes = 0;

  double rate() const { return runs > 0 ? static_cast<double>(successes) / runs : 0.0; }
};

// Bins of `width` in parameter error plus an overall row (lower 0, upper inf).
std::vector<SuccessBin> summarize_success(const std::vector<MetricsRecord>& records,
                                          double width = 0.1);

struct TimingRecord {
  int repetition = 0;
  int stage = 0;
  std::string transport;
  bool ok = false;  // the stage's pipeline completed
  double modeled_seconds = 0.0;
  double compute_seconds = 0.0;
  int iterations = 0;  // prediction plus planning sweeps
  int messages = 0;
};

// Runs the online pipeline once per transport and repetition and records the
// modeled time of each stage's CAV-side solves.
std::vector<TimingRecord> run_timing(const ScenarioConfig& config, const StagePlan& plan,
                                     const RunOptions& options);

struct CsvOptions {
  // Wall-clock columns are written empty so that output bytes depend only on
  // the inputs.
  bool deterministic = false;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records,
                       const CsvOptions& options = {});
// Long format: experiment, mode, noise_std, repetition, stage, step, error.
void write_step_errors_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
void write_success_csv(std::ostream& out, const std::vector<SuccessBin>& bins);
void write_timing_csv(std::ostream& out, const std::vector<TimingRecord>& records,
                      const CsvOptions& options = {});

// Column names of write_metrics_csv, in order.
const std::vector<std::string>& metrics_columns();

double median(std::vector<double> values);

}  // namespace harness
}  // namespace hypercog
