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

// Command-line driver for the experiments. Every subcommand writes CSV to
// --out (stdout by default). On failure a single JSON line
// {"error": ..., "command": ...} goes to stderr and the exit code is nonzero.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hypercog/harness.hpp"
#include "json.hpp"

namespace {

using namespace hypercog;

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  int reps = 0;  // 0: subcommand default
  std::string out = "-";
  int threads = 1;
  bool deterministic = false;
  std::string transport = "distributed";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Scenario JSON; built-in scenario when omitted");
  app->add_option("--seed", c.seed, "Base seed; repetition r uses substream (seed, r)");
  app->add_option("--reps", c.reps, "Repetitions")->check(CLI::NonNegativeNumber);
  app->add_option("--out", c.out, "Output path, - for stdout");
  app->add_option("--threads", c.threads, "Worker threads for repetitions")
      ->check(CLI::PositiveNumber);
  app->add_flag("--deterministic", c.deterministic,
                "Leave wall-clock columns empty so output depends only on inputs");
  app->add_option("--transport", c.transport, "centralized or distributed")
      ->check(CLI::IsMember({"centralized", "distributed"}));
}

ScenarioConfig load(const Common& c, bool online) {
  if (c.config.empty()) {
    return online ? scenario::online_lane_change_config() : scenario::offline_lane_change_config();
  }
  return scenario::load_config_file(c.config);
}

RunOptions options(const Common& c, int default_reps) {
  RunOptions o;
  o.seed = c.seed;
  o.repetitions = c.reps > 0 ? c.reps : default_reps;
  o.threads = c.threads;
  o.transport = c.transport == "centralized" ? netsim::Transport::kCentralized
                                             : netsim::Transport::kDistributed;
  return o;
}

// Writes through `fn` to stdout or to the file named by `path`.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  fn(f);
  if (!f) throw std::runtime_error("failed writing output file: " + path);
}

// "a,b,c" or "start:stop:step" (inclusive stop).
std::vector<double> parse_stds(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, b, c;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, c, ':');
    const double start = std::stod(a);
    const double stop = std::stod(b);
    const double step = std::stod(c);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad noise range: " + text);
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    // Rounded to 12 digits so that 0.01 steps print as 0.01, 0.02, ...
    for (int i = 0; i <= n; ++i) {
      out.push_back(std::round((start + i * step) * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty noise list");
  return out;
}

void write_strategies(std::ostream& out, const EquilibriumResult& result) {
  out << "id,step,px,py,v,psi,a,delta\n";
  char buf[512];
  for (std::size_t i = 0; i < result.ids.size(); ++i) {
    const Strategy& s = result.strategies[i];
    for (int j = 1; j <= s.segment.num_steps(); ++j) {
      const VehicleState x = s.state(j);
      const ControlInput u = s.control(j - 1);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    result.ids[i], s.segment.first_step + j, x.px, x.py, x.v, x.psi, u.a,
                    u.delta);
      out << buf;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergame lane-change experiments"};
  app.require_subcommand(1);
  std::string command;
  {
    std::string cols;
    for (const auto& name : harness::metrics_columns()) cols += (cols.empty() ? "" : ",") + name;
    app.footer("Metrics CSV columns (interpret-offline, run-online, sweep-noise, --runs-out):\n  " +
               cols +
               "\nSuccess summary columns: mode,error_lower,error_upper,runs,successes,rate"
               "\nTiming columns: transport,repetition,stage,ok,modeled_seconds,compute_seconds,"
               "iterations,messages\nDoubles are printed with 17 significant digits.");
  }

  Common c;

  auto* solve = app.add_subcommand("solve", "Solve one forward game and print strategies");
  add_common(solve, c);
  std::string view = "true";
  solve->add_option("--view", view, "true (all true weights) or hv (the HV's game)")
      ->check(CLI::IsMember({"true", "hv"}));

  auto* offline = app.add_subcommand(
      "interpret-offline", "Learn the HV weights from noisy observations of the full horizon");
  add_common(offline, c);
  double noise_std = -1.0;
  offline->add_option("--noise-std", noise_std, "Noise std in m; config value when omitted");

  auto* online = app.add_subcommand("run-online", "Staged online learning and planning");
  add_common(online, c);
  std::string steps_out;
  online->add_option("--steps-out", steps_out, "Per-step position prediction errors CSV");

  auto* sweep = app.add_subcommand("sweep-noise", "Offline pipeline over a list of noise levels");
  add_common(sweep, c);
  std::string stds = "0.01:0.40:0.01";
  sweep->add_option("--stds", stds, "Comma list or start:stop:step");
  sweep->add_option("--steps-out", steps_out, "Per-step position prediction errors CSV");

  auto* success = app.add_subcommand("success-rate", "Success rate by parameter-error bin");
  add_common(success, c);
  std::string mode = "both";
  std::string runs_out;
  double bin_width = 0.1;
  success->add_option("--mode", mode, "with_interpretation, random_cognition or both")
      ->check(CLI::IsMember({"with_interpretation", "random_cognition", "both"}));
  success->add_option("--runs-out", runs_out, "Per-run metrics CSV");
  success->add_option("--bin-width", bin_width, "Parameter-error bin width");

  auto* timing = app.add_subcommand("timing", "Per-stage modeled time, centralized vs distributed");
  add_common(timing, c);

  auto* dump = app.add_subcommand("dump-config", "Print a built-in scenario as JSON");
  std::string which = "offline";
  dump->add_option("--name", which, "offline or online")
      ->check(CLI::IsMember({"offline", "online"}));
  dump->add_option("--out", c.out, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"command", "parse"}}.dump() << '\n';
    return 2;
  }

  command = app.get_subcommands().front()->get_name();
  const harness::CsvOptions csv{c.deterministic};
  try {
    if (command == "solve") {
      const ScenarioConfig config = load(c, false);
      const SegmentSetup setup = cognition::full_horizon(config);
      const GameSpec g = view == "hv"
                             ? cognition::hv_subjective_game(setup, config, config.hv().theta_true)
                             : cognition::true_game(setup, config);
      const netsim::SessionResult r = netsim::run(g, config.solver, options(c, 1).transport);
      emit(c.out, [&](std::ostream& o) { write_strategies(o, r.result); });
      std::cerr << nlohmann::json{{"converged", r.result.converged},
                                  {"iterations", r.result.iterations},
                                  {"max_violation", r.result.max_violation},
                                  {"gaps", r.result.gaps},
                                  {"objectives", r.result.objectives}}
                       .dump()
                << '\n';
    } else if (command == "interpret-offline") {
      const ScenarioConfig config = load(c, false);
      const double s = noise_std >= 0.0 ? noise_std : config.noise.std;
      const auto rows = harness::run_offline_experiment(config, {s}, options(c, 1));
      emit(c.out, [&](std::ostream& o) { harness::write_metrics_csv(o, rows, csv); });
    } else if (command == "run-online") {
      const ScenarioConfig config = load(c, true);
      const auto rows =
          harness::run_online_experiment(config, StagePlan::of(config), options(c, 50));
      emit(c.out, [&](std::ostream& o) { harness::write_metrics_csv(o, rows, csv); });
      if (!steps_out.empty()) {
        emit(steps_out, [&](std::ostream& o) { harness::write_step_errors_csv(o, rows); });
      }
    } else if (command == "sweep-noise") {
      const ScenarioConfig config = load(c, false);
      const auto rows = harness::run_offline_experiment(config, parse_stds(stds), options(c, 50));
      emit(c.out, [&](std::ostream& o) { harness::write_metrics_csv(o, rows, csv); });
      if (!steps_out.empty()) {
        emit(steps_out, [&](std::ostream& o) { harness::write_step_errors_csv(o, rows); });
      }
    } else if (command == "success-rate") {
      const ScenarioConfig config = load(c, false);
      std::vector<MetricsRecord> rows;
      auto run = [&](harness::SuccessMode m, int default_reps) {
        auto r = harness::run_success_rate(config, m, options(c, default_reps));
        rows.insert(rows.end(), r.begin(), r.end());
      };
      if (mode != "random_cognition") run(harness::SuccessMode::kWithInterpretation, 100);
      if (mode != "with_interpretation") run(harness::SuccessMode::kRandomCognition, 1000);
      const auto bins = harness::summarize_success(rows, bin_width);
      emit(c.out, [&](std::ostream& o) { harness::write_success_csv(o, bins); });
      if (!runs_out.empty()) {
        emit(runs_out, [&](std::ostream& o) { harness::write_metrics_csv(o, rows, csv); });
      }
    } else if (command == "timing") {
      const ScenarioConfig config = load(c, true);
      const auto rows = harness::run_timing(config, StagePlan::of(config), options(c, 10));
      emit(c.out, [&](std::ostream& o) { harness::write_timing_csv(o, rows, csv); });
    } else if (command == "dump-config") {
      const ScenarioConfig config = which == "online" ? scenario::online_lane_change_config()
                                                      : scenario::offline_lane_change_config();
      emit(c.out, [&](std::ostream& o) { o << scenario::dump_config(config) << '\n'; });
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"command", command}}.dump() << '\n';
    return 1;
  }
  return 0;
}
