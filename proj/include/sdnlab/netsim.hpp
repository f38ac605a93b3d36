#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sdnlab/net.hpp"
#include "sdnlab/topo.hpp"

namespace sdnlab {

enum class FlowClass { Unclassified, BandwidthIntensive, LatencyOriented };

std::string_view to_string(FlowClass c);
FlowClass parse_flow_class(std::string_view s);

/// One TCP stream in the fluid model.
struct TrafficFlow {
  std::string id;
  std::string src;
  std::string dst;
  HeaderTuple header;
  std::optional<Path> path;                   // set once a controller routes it
  std::optional<double> per_stream_cap_mbps;  // nullopt = unlimited
  std::optional<FlowClass> class_hint;
};

/// flow id -> rate in Mbps.
using Allocation = std::map<std::string, double>;

/// Progressive-filling max-min fair rates. Each link direction offers
/// capacity x efficiency; flows crossing a link in `down` get zero.
/// Throws Error(Validation) for an unrouted flow.
Allocation allocate_max_min(const Topology& t, std::span<const TrafficFlow> flows, const LinkSet& down = {});

/// Round-trip time along `p`: twice the summed one-way latencies.
double flow_rtt_ms(const Topology& t, const Path& p);

/// Per link, the larger of the two directional loads under `a`.
std::map<std::string, double> link_loads(const Topology& t, std::span<const TrafficFlow> flows, const Allocation& a);

}  // namespace sdnlab
