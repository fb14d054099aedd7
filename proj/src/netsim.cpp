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

#include "hypercog/netsim.hpp"

#include <algorithm>
#include <ctime>
#include <limits>
#include <map>

#include "json.hpp"

namespace hypercog::netsim {

std::string NodeId::to_string() const {
  return role == NodeRole::kRsu ? std::string("rsu") : "cav" + std::to_string(player);
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kStrategyBroadcast:
      return "strategy_broadcast";
    case MessageKind::kStopSignal:
      return "stop_signal";
    case MessageKind::kStartRound:
      return "start_round";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kSetup:
      return "setup";
    case EventKind::kBestResponse:
      return "best_response";
    case EventKind::kStoppingCheck:
      return "stopping_check";
    case EventKind::kDiagnostic:
      return "diagnostic";
  }
  return "unknown";
}

double SessionTrace::modeled_seconds() const {
  std::map<int, double> slowest;
  for (const auto& e : events) {
    double& s = slowest[e.slot];
    s = std::max(s, e.seconds);
  }
  double total = 0.0;
  for (const auto& [slot, s] : slowest) total += s;
  return total;
}

double SessionTrace::total_compute_seconds() const {
  double total = 0.0;
  for (const auto& e : events) total += e.seconds;
  return total;
}

int SessionTrace::count(MessageKind kind) const {
  return static_cast<int>(std::count_if(messages.begin(), messages.end(),
                                        [&](const ProtocolMessage& m) { return m.kind == kind; }));
}

int SessionTrace::count(EventKind kind) const {
  return static_cast<int>(std::count_if(events.begin(), events.end(),
                                        [&](const ComputeEvent& e) { return e.kind == kind; }));
}

std::string SessionTrace::to_jsonl() const {
  std::string out;
  for (const auto& m : messages) {
    nlohmann::json j;
    j["type"] = "message";
    j["kind"] = to_string(m.kind);
    j["sender"] = m.sender.to_string();
    std::vector<std::string> to;
    for (const auto& r : m.recipients) to.push_back(r.to_string());
    j["recipients"] = to;
    j["iteration"] = m.iteration;
    if (m.kind == MessageKind::kStrategyBroadcast) {
      j["player"] = m.player;
      j["feasible"] = m.feasible;
      j["size"] = m.strategy.size();
    }
    out += j.dump();
    out += '\n';
  }
  for (const auto& e : events) {
    nlohmann::json j;
    j["type"] = "event";
    j["kind"] = to_string(e.kind);
    j["node"] = e.node.to_string();
    j["iteration"] = e.iteration;
    j["player"] = e.player;
    j["slot"] = e.slot;
    j["seconds"] = e.seconds;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

// CPU time of the calling thread. Events are charged the work they did, not
// time lost to other processes or threads.
struct Clock {
  using time_point = double;
  static time_point now() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
  }
};

double seconds_since(Clock::time_point start) { return Clock::now() - start; }

struct Node {
  NodeId id;
  std::vector<int> owned;  // player indices, ascending
  std::map<int, game::PlayerProblem> problems;
  Profile local;
};

// Both transports run this loop. With `distributed` false every player is
// owned by the RSU, nothing is sent, and each event gets its own slot.
class Session {
 public:
  Session(const GameSpec& game, const SolverSettings& settings, bool distributed)
      : game_(game), settings_(settings), distributed_(distributed) {}

  SessionResult run() {
    try {
      return run_unchecked();
    } catch (const SessionFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw SessionFailure(e.what(), std::move(trace_));
    }
  }

 private:
  SessionResult run_unchecked() {
    game_.validate();
    settings_.validate();
    build_nodes();
    const Profile initial = game::initial_profile(game_);
    for (auto& node : nodes_) node.local = initial;

    setup();

    EquilibriumResult result;
    for (int zeta = 1; zeta <= settings_.max_iterations; ++zeta) {
      double progress = 0.0;
      result.degraded = false;
      result.infeasible_players.clear();
      for (int index : deciding_) {
        Node& owner = owner_of(index);
        const game::PlayerProblem& problem = owner.problems.at(index);
        const auto start = Clock::now();
        const QpSolution sol = problem.best_response(owner.local, settings_);
        record(owner.id, EventKind::kBestResponse, zeta, problem.id(), next_slot(), start);

        const Strategy& before = rsu().local[index];
        if (sol.optimal()) {
          progress = std::max(progress, game::relative_progress(sol.s_star, before.data));
        } else {
          result.degraded = true;
          result.infeasible_players.push_back(problem.id());
        }
        deliver(owner, index, zeta, sol);
      }

      const auto start = Clock::now();
      double violation = 0.0;
      for (const auto& check : checks_) violation = std::max(violation, check.violation(rsu().local));
      record(NodeId::rsu(), EventKind::kStoppingCheck, zeta, -1, next_slot(), start);

      result.iterations = zeta;
      result.last_progress = progress;
      result.max_violation = violation;
      trace_.rounds = zeta;
      const bool stop = (progress <= settings_.relative_step_progress &&
                         violation <= settings_.constraint_violation_threshold && !result.degraded);
      if (stop) result.converged = true;
      if (stop || zeta == settings_.max_iterations) {
        control(MessageKind::kStopSignal, zeta);
        break;
      }
      control(MessageKind::kStartRound, zeta + 1);
    }

    diagnostics(result);
    result.strategies = rsu().local;
    return {std::move(result), std::move(trace_)};
  }

  void build_nodes() {
    nodes_.push_back(Node{NodeId::rsu(), {}, {}, {}});
    for (std::size_t i = 0; i < game_.players.size(); ++i) {
      const GamePlayer& p = game_.players[i];
      if (!p.decides) continue;
      deciding_.push_back(static_cast<int>(i));
      if (!distributed_ || p.model.id == 0) {
        nodes_.front().owned.push_back(static_cast<int>(i));
      } else {
        nodes_.push_back(Node{NodeId::cav(p.model.id), {static_cast<int>(i)}, {}, {}});
      }
    }
    for (const auto& n : nodes_) trace_.nodes.push_back(n.id);
  }

  void setup() {
    // Every node factors its own subproblems concurrently.
    const int slot = distributed_ ? next_slot() : 0;
    for (auto& node : nodes_) {
      for (int index : node.owned) {
        const auto start = Clock::now();
        auto [it, inserted] = node.problems.try_emplace(index, game_, index);
        it->second.prepare();
        record(node.id, EventKind::kSetup, 0, it->second.id(), distributed_ ? slot : next_slot(),
               start);
      }
    }
    const auto start = Clock::now();
    for (int index : deciding_) checks_.emplace_back(game_, index);
    record(NodeId::rsu(), EventKind::kSetup, 0, -1, distributed_ ? slot : next_slot(), start);
  }

  void deliver(const Node& sender, int index, int zeta, const QpSolution& sol) {
    if (distributed_) {
      ProtocolMessage m;
      m.kind = MessageKind::kStrategyBroadcast;
      m.sender = sender.id;
      m.iteration = zeta;
      m.player = game_.players[index].model.id;
      m.strategy = sol.optimal() ? sol.s_star : sender.local[index].data;
      m.feasible = sol.optimal();
      for (const auto& n : nodes_) {
        if (!(n.id == sender.id)) m.recipients.push_back(n.id);
      }
      trace_.messages.push_back(m);
      const ProtocolMessage& sent = trace_.messages.back();
      for (auto& n : nodes_) {
        if (sent.feasible) n.local[index].data = sent.strategy;
      }
    } else if (sol.optimal()) {
      nodes_.front().local[index].data = sol.s_star;
    }
  }

  void control(MessageKind kind, int iteration) {
    if (!distributed_) return;
    ProtocolMessage m;
    m.kind = kind;
    m.sender = NodeId::rsu();
    m.iteration = iteration;
    for (std::size_t i = 1; i < nodes_.size(); ++i) m.recipients.push_back(nodes_[i].id);
    trace_.messages.push_back(std::move(m));
  }

  void diagnostics(EquilibriumResult& result) {
    // Gaps of the final profile; each node checks its own players concurrently.
    const int slot = distributed_ ? next_slot() : 0;
    std::map<int, std::pair<double, double>> per_index;  // objective, gap
    for (auto& node : nodes_) {
      for (int index : node.owned) {
        const game::PlayerProblem& problem = node.problems.at(index);
        const auto start = Clock::now();
        const double current = problem.objective(node.local[index].data);
        const QpSolution sol = problem.best_response(node.local, settings_);
        const double gap = sol.optimal() ? current - problem.objective(sol.s_star)
                                         : std::numeric_limits<double>::infinity();
        record(node.id, EventKind::kDiagnostic, 0, problem.id(), distributed_ ? slot : next_slot(),
               start);
        per_index[index] = {current, gap};
      }
    }
    for (std::size_t i = 0; i < game_.players.size(); ++i) {
      result.ids.push_back(game_.players[i].model.id);
      const auto it = per_index.find(static_cast<int>(i));
      result.objectives.push_back(it == per_index.end() ? 0.0 : it->second.first);
      result.gaps.push_back(it == per_index.end() ? 0.0 : it->second.second);
    }
  }

  Node& rsu() { return nodes_.front(); }

  Node& owner_of(int index) {
    for (auto& n : nodes_) {
      if (std::find(n.owned.begin(), n.owned.end(), index) != n.owned.end()) return n;
    }
    throw std::logic_error("no node owns player index " + std::to_string(index));
  }

  int next_slot() { return slot_++; }

  void record(NodeId node, EventKind kind, int iteration, int player, int slot,
              Clock::time_point start) {
    trace_.events.push_back({node, kind, iteration, player, slot, seconds_since(start)});
  }

  const GameSpec& game_;
  const SolverSettings& settings_;
  bool distributed_;
  std::vector<Node> nodes_;
  std::vector<int> deciding_;
  std::vector<game::PlayerProblem> checks_;
  SessionTrace trace_;
  int slot_ = 0;
};

}  // namespace

SessionResult run_distributed(const GameSpec& game, const SolverSettings& settings) {
  return Session(game, settings, true).run();
}

SessionResult run_centralized(const GameSpec& game, const SolverSettings& settings) {
  return Session(game, settings, false).run();
}

SessionResult run(const GameSpec& game, const SolverSettings& settings, Transport transport) {
  return transport == Transport::kDistributed ? run_distributed(game, settings)
                                              : run_centralized(game, settings);
}

}  // namespace hypercog::netsim
