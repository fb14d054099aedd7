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


// Python bindings. Scenarios cross the boundary as JSON text and experiment
// results as CSV text, so the Python side needs no mirror of the C++ structs.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypercog/harness.hpp"

namespace py = pybind11;
using namespace hypercog;

namespace {

using State = std::array<double, 4>;
using Control = std::array<double, 2>;

VehicleState to_state(const State& s) { return {s[0], s[1], s[2], s[3]}; }
ControlInput to_control(const Control& u) { return {u[0], u[1]}; }

ScenarioConfig config_or_builtin(const std::optional<std::string>& json, bool online) {
  if (json) return scenario::load_config(*json);
  return online ? scenario::online_lane_change_config() : scenario::offline_lane_change_config();
}

RunOptions run_options(std::uint64_t seed, int reps, int threads) {
  RunOptions o;
  o.seed = seed;
  o.repetitions = reps;
  o.threads = threads;
  return o;
}

netsim::Transport parse_transport(const std::string& name) {
  if (name == "distributed") return netsim::Transport::kDistributed;
  if (name == "centralized") return netsim::Transport::kCentralized;
  throw std::invalid_argument("transport must be centralized or distributed: " + name);
}

std::string metrics_csv(const std::vector<MetricsRecord>& rows) {
  std::ostringstream out;
  harness::write_metrics_csv(out, rows, {true});
  return out.str();
}

py::dict solve_game(const std::optional<std::string>& config_json, const std::string& view,
                    const std::string& transport) {
  const ScenarioConfig config = config_or_builtin(config_json, false);
  const SegmentSetup setup = cognition::full_horizon(config);
  GameSpec game;
  if (view == "true") {
    game = cognition::true_game(setup, config);
  } else if (view == "hv") {
    game = cognition::hv_subjective_game(setup, config, config.hv().theta_true);
  } else {
    throw std::invalid_argument("view must be true or hv: " + view);
  }
  const netsim::SessionResult session = netsim::run(game, config.solver, parse_transport(transport));
  const EquilibriumResult& r = session.result;
  py::dict strategies;
  for (std::size_t i = 0; i < r.ids.size(); ++i) {
    const Strategy& s = r.strategies[i];
    const int n = s.segment.num_steps();
    Eigen::MatrixXd states(n, 4);
    Eigen::MatrixXd controls(n, 2);
    for (int j = 1; j <= n; ++j) {
      states.row(j - 1) = s.state(j).vector().transpose();
      controls.row(j - 1) = s.control(j - 1).vector().transpose();
    }
    strategies[py::int_(r.ids[i])] = py::dict(py::arg("states") = states,
                                              py::arg("controls") = controls);
  }
  return py::dict(py::arg("ids") = r.ids, py::arg("strategies") = strategies,
                  py::arg("converged") = r.converged, py::arg("degraded") = r.degraded,
                  py::arg("iterations") = r.iterations, py::arg("gaps") = r.gaps,
                  py::arg("objectives") = r.objectives,
                  py::arg("max_violation") = r.max_violation,
                  py::arg("messages") = static_cast<int>(session.trace.messages.size()));
}

}  // namespace

PYBIND11_MODULE(_hypercog, m) {
  m.doc() = "Hypergame lane-change planning and inverse learning";

  m.def(
      "euler_step",
      [](const State& x, const Control& u, double ts) {
        const VehicleState n = dynamics::euler_step(to_state(x), to_control(u), {}, ts);
        return State{n.px, n.py, n.v, n.psi};
      },
      py::arg("state"), py::arg("control"), py::arg("ts"),
      "One forward-Euler step of the kinematic bicycle with default geometry.");
  m.def(
      "linearize_discrete",
      [](const State& x, const Control& u, double ts) {
        const LinearizedStep l = dynamics::linearize_discrete(to_state(x), to_control(u), {}, ts);
        return py::make_tuple(Eigen::MatrixXd(l.A), Eigen::MatrixXd(l.B), Eigen::VectorXd(l.c));
      },
      py::arg("state"), py::arg("control"), py::arg("ts"),
      "Returns (A, B, c) of the discrete step linearized at (state, control).");

  m.def(
      "solve_qp",
      [](const Eigen::MatrixXd& H, const Eigen::VectorXd& f, const Eigen::MatrixXd& A_eq,
         const Eigen::VectorXd& b_eq, const Eigen::MatrixXd& A_in, const Eigen::VectorXd& b_in) {
        const QpSolution s = qp::solve(QpProblem{H, f, A_eq, b_eq, A_in, b_in});
        return py::dict(py::arg("status") = std::string(to_string(s.status)),
                        py::arg("x") = s.s_star, py::arg("mu") = s.mu,
                        py::arg("lam") = s.lambda, py::arg("iterations") = s.iterations);
      },
      py::arg("H"), py::arg("f"), py::arg("A_eq"), py::arg("b_eq"), py::arg("A_in"),
      py::arg("b_in"), "Minimizes 0.5 x'Hx + f'x s.t. A_eq x = b_eq, A_in x <= b_in.");

  m.def(
      "builtin_config",
      [](const std::string& name) {
        if (name != "offline" && name != "online") {
          throw std::invalid_argument("name must be offline or online: " + name);
        }
        return scenario::dump_config(config_or_builtin(std::nullopt, name == "online"));
      },
      py::arg("name") = "offline", "JSON text of a built-in scenario.");
  m.def(
      "validate_config", [](const std::string& json) { scenario::load_config(json); },
      py::arg("json"), "Raises ValueError when the scenario JSON is invalid.");

  m.def("solve_game", &solve_game, py::arg("config") = std::nullopt, py::arg("view") = "true",
        py::arg("transport") = "distributed",
        "Solves the full-horizon game; view 'true' uses every vehicle's true weights, 'hv' the "
        "HV's own game.");

  m.def(
      "run_offline",
      [](const std::vector<double>& noise_stds, std::uint64_t seed, int reps, int threads,
         const std::optional<std::string>& config) {
        return metrics_csv(harness::run_offline_experiment(config_or_builtin(config, false),
                                                           noise_stds,
                                                           run_options(seed, reps, threads)));
      },
      py::arg("noise_stds"), py::arg("seed") = 1, py::arg("reps") = 1, py::arg("threads") = 1,
      py::arg("config") = std::nullopt, "Offline noise sweep; metrics CSV text.");
  m.def(
      "run_online",
      [](std::uint64_t seed, int reps, int threads, const std::optional<std::string>& config) {
        const ScenarioConfig c = config_or_builtin(config, true);
        return metrics_csv(
            harness::run_online_experiment(c, StagePlan::of(c), run_options(seed, reps, threads)));
      },
      py::arg("seed") = 1, py::arg("reps") = 1, py::arg("threads") = 1,
      py::arg("config") = std::nullopt, "Staged online run; metrics CSV text, one row per stage.");
  m.def(
      "success_rate",
      [](const std::string& mode, std::uint64_t seed, int reps, double bin_width,
         const std::optional<std::string>& config) {
        const auto rows = harness::run_success_rate(config_or_builtin(config, false),
                                                    harness::parse_success_mode(mode),
                                                    run_options(seed, reps, 1));
        std::ostringstream out;
        harness::write_success_csv(out, harness::summarize_success(rows, bin_width));
        return out.str();
      },
      py::arg("mode"), py::arg("seed") = 1, py::arg("reps") = 1, py::arg("bin_width") = 0.1,
      py::arg("config") = std::nullopt, "Success summary CSV text by parameter-error bin.");
  m.def(
      "timing",
      [](std::uint64_t seed, int reps, const std::optional<std::string>& config) {
        const ScenarioConfig c = config_or_builtin(config, true);
        std::ostringstream out;
        harness::write_timing_csv(out, harness::run_timing(c, StagePlan::of(c),
                                                           run_options(seed, reps, 1)),
                                  {true});
        return out.str();
      },
      py::arg("seed") = 1, py::arg("reps") = 1, py::arg("config") = std::nullopt,
      "Per-stage modeled time for both transports; CSV text.");
  m.def("metrics_columns", &harness::metrics_columns);
}
