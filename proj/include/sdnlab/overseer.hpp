#pragma once

#include <set>
#include <vector>

#include "sdnlab/controller.hpp"

namespace sdnlab {

/// Destination ports treated as bulk transfers when no application
/// declaration matches: FTP data/control, rsync, GridFTP control, iperf,
/// and the conventional GridFTP data range 50000-51000.
struct BulkPortList {
  std::set<std::uint16_t> ports{20, 21, 873, 2811, 5001};
  std::uint16_t range_lo = 50000;
  std::uint16_t range_hi = 51000;

  bool contains(std::uint16_t p) const { return ports.count(p) != 0 || (p >= range_lo && p <= range_hi); }
};

/// Most specific matching declaration wins, later ones break ties; otherwise
/// the destination-port heuristic decides.
FlowClass classify_flow(const HeaderTuple& h, const std::vector<AppDeclaration>& declarations,
                        const BulkPortList& bulk = {});

/// Smoothed view of the network as seen by the monitor.
struct LinkView {
  double residual_mbps = 0;
  double rtt_ms = 0;
};
using StatsView = std::map<std::string, LinkView>;

struct PathScore {
  Path path;
  double residual_bottleneck_mbps = 0;
  double total_rtt_ms = 0;
};

/// Scores a path from `stats`; links without a sample count as idle.
/// `credit` adds bandwidth back on named links (a flow's own usage).
PathScore score_path(const Topology& t, const StatsView& stats, const Path& p,
                     const std::map<std::string, double>& credit = {});

/// True when `a` is the better choice than `b` for the class.
bool better_for_class(const PathScore& a, const PathScore& b, FlowClass c);

/// Best path among the 8 hop-shortest candidates for the class.
/// Throws Error(Validation) when no path exists.
Path select_path(const Topology& t, const StatsView& stats, std::string_view src, std::string_view dst, FlowClass c,
                 const LinkSet& excluded = {});

struct OverseerConfig {
  double improvement = 0.20;
  int dwell_epochs = 5;
  std::size_t candidates = 8;
  BulkPortList bulk;
};

/// Bandwidth/latency aware routing with rerouting hysteresis.
class OverseerController : public BaselineController {
 public:
  OverseerController(const Topology& t, AddressBook book, OverseerConfig cfg = {},
                     std::string owner = std::string(kRootOwner));

  FlowClass flow_class(const std::string& flow) const;
  const StatsView& stats() const { return stats_; }

  /// Moves flows whose class metric improves by the configured margin after
  /// the dwell time. Called on every epoch tick.
  std::vector<Directive> reroute(int epoch);

 protected:
  std::vector<Directive> on_packet_in(const PacketIn& pi, int epoch) override;
  std::vector<Directive> on_other(const ControllerEvent& e) override;
  std::optional<Path> failover_path(const std::string& flow, const Route& r) override;

 private:
  OverseerConfig cfg_;
  std::vector<AppDeclaration> declarations_;
  StatsView stats_;
  std::map<std::string, double> flow_rates_;
  std::map<std::string, FlowClass> classes_;
};

}  // namespace sdnlab
