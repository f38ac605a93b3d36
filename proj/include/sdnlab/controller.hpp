#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sdnlab/dataplane.hpp"
#include "sdnlab/netsim.hpp"
#include "sdnlab/topo.hpp"

namespace sdnlab {

// ---- events -------------------------------------------------------------

/// A table miss. `flow` tags the simulated stream that raised it, the way a
/// buffer id would on a real switch.
struct PacketIn {
  std::string switch_id;
  std::uint32_t port = 0;
  HeaderTuple header;
  std::string flow;
};

struct LinkStats {
  std::string link;
  double used_mbps = 0;
  double residual_mbps = 0;
  double rtt_ms = 0;
};

struct FlowStats {
  std::string flow;
  double rate_mbps = 0;
};

struct FlowEnded {
  std::string flow;
};

struct EpochTick {
  int epoch = 0;
};

struct PortStatus {
  std::string link;
  bool up = true;
};

/// Application-side declaration of a flow's class.
struct AppDeclaration {
  MatchPattern match;
  FlowClass cls = FlowClass::Unclassified;
};

/// Advance request for K paths ahead of a striped bulk transfer.
struct TransferRequest {
  std::string id;
  std::string src;
  std::string dst;
  int n_streams = 1;
  int requested_paths = 1;
};

using ControllerEventBody =
    std::variant<PacketIn, LinkStats, FlowStats, FlowEnded, EpochTick, PortStatus, AppDeclaration, TransferRequest>;

struct ControllerEvent {
  int epoch = 0;
  ControllerEventBody body;
};

// ---- directives ---------------------------------------------------------

struct InstallDirective {
  std::string switch_id;
  FlowEntry entry;
};

struct RemoveDirective {
  std::string switch_id;
  std::string cookie;
};

struct RouteFlowDirective {
  std::string flow;
  Path path;
};

using Directive = std::variant<InstallDirective, RemoveDirective, RouteFlowDirective>;

/// One-line renderings used by the event and directive logs.
std::string to_line(const ControllerEvent& e);
ControllerEvent parse_event_line(std::string_view line);
std::string to_line(const Directive& d);
Directive parse_directive_line(std::string_view line);

// ---- controller contract ------------------------------------------------

/// Controllers are synchronous state machines: events in, directives out.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::vector<Directive> handle_event(const ControllerEvent& e) = 0;
};

/// Maps host addresses to host node ids for a controller's view.
class AddressBook {
 public:
  AddressBook() = default;
  static AddressBook from_topology(const Topology& t);

  void add(Ipv4 ip, std::string host) { hosts_[ip.value] = std::move(host); }
  const std::string* lookup(Ipv4 ip) const;

 private:
  std::map<std::uint32_t, std::string> hosts_;
};

/// Lays one entry per switch of `p`, each outputting toward the next hop.
/// `p` must end at a host.
std::vector<Directive> install_path(const Topology& t, const Path& p, const MatchPattern& m, std::string_view owner,
                                    std::string_view cookie, int priority = 100);

/// Per-link load monitor with EWMA smoothing of the used bandwidth.
class LinkMonitor {
 public:
  explicit LinkMonitor(double alpha = 0.5) : alpha_(alpha) {}

  /// One link_stats per up link (declaration order), then one flow_stats per
  /// routed flow in `flows` order.
  std::vector<ControllerEventBody> sample(const Topology& t, std::span<const TrafficFlow> flows, const Allocation& a,
                                          const LinkSet& down);

  double smooth(const std::string& link, double used);

 private:
  double alpha_;
  std::map<std::string, double> smoothed_;
};

/// Hop-count shortest path routing with per-flow five-tuple rules and
/// reroute-on-failure. Also the base for the specialised controllers.
class BaselineController : public Controller {
 public:
  BaselineController(const Topology& t, AddressBook book, std::string owner = std::string(kRootOwner));

  std::vector<Directive> handle_event(const ControllerEvent& e) override;

  struct Route {
    HeaderTuple header;
    Path path;
    std::string cookie;
    int since_epoch = 0;
  };
  const std::map<std::string, Route>& routes() const { return routes_; }

 protected:
  virtual std::vector<Directive> on_packet_in(const PacketIn& pi, int epoch);
  virtual std::vector<Directive> on_other(const ControllerEvent& e);
  virtual std::optional<Path> failover_path(const std::string& flow, const Route& r);

  /// Installs `path` for `flow` and records it.
  std::vector<Directive> route(const std::string& flow, const HeaderTuple& h, const Path& path, int epoch);
  /// Removes the rules of `flow` and forgets it.
  std::vector<Directive> unroute(const std::string& flow);
  /// Hop-shortest path avoiding known-down links.
  std::optional<Path> shortest(const std::string& src, const std::string& dst) const;
  /// Resolves ip_src/ip_dst to hosts.
  std::optional<std::pair<std::string, std::string>> endpoints(const HeaderTuple& h) const;

  const Topology& topo_;
  AddressBook book_;
  std::string owner_;
  LinkSet down_;
  std::map<std::string, Route> routes_;
};

}  // namespace sdnlab
