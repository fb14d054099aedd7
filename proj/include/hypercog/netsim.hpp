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
// Simulated V2X session for the best-response iteration.
//
// One node per deciding CAV plus a roadside unit (RSU). Nodes are activated
// one at a time in ascending player id; each activation computes a best
// response against the node's local copy of the profile and broadcasts the
// result. After every sweep the RSU evaluates the stopping rule and sends
// either start_round (continue) or stop_signal. The RSU also computes the HV's
// subproblem when the HV is a deciding player of a simulated game.
//
// Timing model: every compute event is timed with a wall clock and assigned
// to an activation slot. Events sharing a slot run concurrently, so the
// modeled session time is the sum over slots of the slowest event. A
// centralized session runs every event on one node, one slot each.
//
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypercog/game.hpp"

namespace hypercog::netsim {

enum class NodeRole { kRsu, kCav };

struct NodeId {
  NodeRole role = NodeRole::kRsu;
  int player = -1;  // CAV id; -1 for the RSU

  static NodeId rsu() { return {NodeRole::kRsu, -1}; }
  static NodeId cav(int id) { return {NodeRole::kCav, id}; }
  bool operator==(const NodeId&) const = default;
  std::string to_string() const;
};

enum class MessageKind { kStrategyBroadcast, kStopSignal, kStartRound };

std::string_view to_string(MessageKind kind);

struct ProtocolMessage {
  MessageKind kind = MessageKind::kStartRound;
  NodeId sender;
  std::vector<NodeId> recipients;
  int iteration = 0;
  // Broadcasts only.
  int player = -1;
  Eigen::VectorXd strategy;
  bool feasible = true;
};

enum class EventKind { kSetup, kBestResponse, kStoppingCheck, kDiagnostic };

std::string_view to_string(EventKind kind);

struct ComputeEvent {
  NodeId node;
  EventKind kind = EventKind::kSetup;
  int iteration = 0;  // 0 for setup and diagnostics
  int player = -1;    // subproblem owner; -1 for stopping checks
  int slot = 0;
  double seconds = 0.0;  // CPU time of the computing thread
};

struct SessionTrace {
  std::vector<NodeId> nodes;
  std::vector<ProtocolMessage> messages;
  std::vector<ComputeEvent> events;
  int rounds = 0;

  // Sum over slots of the slowest event in the slot.
  double modeled_seconds() const;
  // Sum of all event times.
  double total_compute_seconds() const;
  int count(MessageKind kind) const;
  int count(EventKind kind) const;
  // One JSON object per line: messages first, then events.
  std::string to_jsonl() const;
};

struct SessionResult {
  EquilibriumResult result;
  SessionTrace trace;
};

// A node threw; `trace` holds everything recorded up to the failure.
class SessionFailure : public std::runtime_error {
 public:
  SessionFailure(const std::string& what, SessionTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const SessionTrace& trace() const { return trace_; }

 private:
  SessionTrace trace_;
};

SessionResult run_distributed(const GameSpec& game, const SolverSettings& settings);
SessionResult run_centralized(const GameSpec& game, const SolverSettings& settings);

enum class Transport { kCentralized, kDistributed };

SessionResult run(const GameSpec& game, const SolverSettings& settings, Transport transport);

}  // namespace hypercog::netsim
