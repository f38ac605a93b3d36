#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdnlab/controller.hpp"
#include "sdnlab/dataplane.hpp"
#include "sdnlab/netsim.hpp"

namespace sdnlab {

enum class SimEventKind { FlowStart, FlowStop, LinkFail, LinkRestore, Notify };

/// A scheduled change to the simulated network. `Notify` forwards an
/// application-originated message (declaration, transfer request) to the
/// controller.
struct SimEvent {
  int at_epoch = 0;
  SimEventKind kind = SimEventKind::FlowStart;
  std::string subject;                       // flow or link id
  std::optional<TrafficFlow> flow;           // FlowStart
  std::optional<ControllerEventBody> notice;  // Notify
};

struct EpochRecord {
  int epoch = 0;
  Allocation allocation;
  std::map<std::string, std::string> paths;  // flow id -> hops ("" when unrouted)
};

/// Data-plane walk of a flow's header taken right after the controller
/// routed it.
struct RouteTrace {
  int epoch = 0;
  std::string flow;
  ForwardTrace trace;
  bool follows_path = false;
};

struct RunResult {
  std::vector<EpochRecord> series;
  std::vector<std::string> event_log;
  std::vector<std::string> directive_log;
  std::vector<RouteTrace> traces;
  std::map<std::string, TrafficFlow> flows;  // every flow that started, last known state
};

struct RunOptions {
  int epochs = 1;
  std::size_t hop_limit = 64;
  double monitor_alpha = 0.5;
};

/// Per epoch: deliver the previous epoch's monitor samples, apply scheduled
/// events, tick the controller, then compute the max-min allocation.
/// Directive errors raise Error(Directive).
RunResult run(const Topology& t, const std::vector<SimEvent>& events, Controller& controller, const RunOptions& opts);

}  // namespace sdnlab
