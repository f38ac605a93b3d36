#include "sdnlab/netsim.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "sdnlab/error.hpp"

namespace sdnlab {

std::string_view to_string(FlowClass c) {
  switch (c) {
    case FlowClass::BandwidthIntensive: return "bandwidth_intensive";
    case FlowClass::LatencyOriented: return "latency_oriented";
    case FlowClass::Unclassified: return "unclassified";
  }
  return "?";
}

FlowClass parse_flow_class(std::string_view s) {
  if (s == "bandwidth_intensive") return FlowClass::BandwidthIntensive;
  if (s == "latency_oriented") return FlowClass::LatencyOriented;
  if (s == "unclassified") return FlowClass::Unclassified;
  throw Error(ErrorKind::Validation, "unknown flow class '" + std::string(s) + "'");
}

namespace {

/// Directed resources (link index * 2 + direction) crossed by a path.
std::vector<std::size_t> resources_of(const Topology& t, const Path& p) {
  auto nodes = t.path_nodes(p);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.hops.size(); ++i) {
    auto li = t.link_index(p.hops[i]);
    out.push_back(li * 2 + (t.links()[li].a == nodes[i] ? 0 : 1));
  }
  return out;
}

}  // namespace

Allocation allocate_max_min(const Topology& t, std::span<const TrafficFlow> flows, const LinkSet& down) {
  const auto nf = flows.size();
  std::vector<std::vector<std::size_t>> uses(nf);
  std::vector<double> rate(nf, 0.0);
  std::vector<char> frozen(nf, 0);
  std::vector<double> remaining(t.links().size() * 2);
  for (std::size_t l = 0; l < t.links().size(); ++l) {
    remaining[2 * l] = remaining[2 * l + 1] = t.links()[l].usable_mbps();
  }

  for (std::size_t f = 0; f < nf; ++f) {
    if (!flows[f].path) throw Error(ErrorKind::Validation, "flow '" + flows[f].id + "' is not routed");
    const auto& p = *flows[f].path;
    if (p.src != flows[f].src || p.dst != flows[f].dst) {
      throw Error(ErrorKind::Validation, "flow '" + flows[f].id + "' path endpoints do not match the flow");
    }
    uses[f] = resources_of(t, p);
    const bool broken = std::any_of(p.hops.begin(), p.hops.end(), [&](const auto& h) { return down.count(h) != 0; });
    const auto& cap = flows[f].per_stream_cap_mbps;
    if (cap && !(*cap > 0)) throw Error(ErrorKind::Validation, "flow '" + flows[f].id + "' has a non-positive cap");
    if (broken) frozen[f] = 1;
  }

  constexpr double kRel = 1e-12;
  while (true) {
    std::vector<std::size_t> active(remaining.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < nf; ++f) {
      if (frozen[f]) continue;
      any = true;
      for (auto r : uses[f]) ++active[r];
    }
    if (!any) break;

    double level = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      if (active[r] > 0) level = std::min(level, std::max(0.0, remaining[r]) / double(active[r]));
    }
    for (std::size_t f = 0; f < nf; ++f) {
      if (!frozen[f] && flows[f].per_stream_cap_mbps) level = std::min(level, *flows[f].per_stream_cap_mbps);
    }
    const double tol = std::max(level, 1.0) * kRel;

    std::vector<char> saturated(remaining.size(), 0);
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      if (active[r] > 0 && std::max(0.0, remaining[r]) / double(active[r]) <= level + tol) saturated[r] = 1;
    }
    std::vector<std::size_t> newly;
    for (std::size_t f = 0; f < nf; ++f) {
      if (frozen[f]) continue;
      const auto& cap = flows[f].per_stream_cap_mbps;
      if (cap && *cap <= level + tol) {
        rate[f] = *cap;
        newly.push_back(f);
      } else if (std::any_of(uses[f].begin(), uses[f].end(), [&](auto r) { return saturated[r] != 0; })) {
        rate[f] = level;
        newly.push_back(f);
      }
    }
    for (auto f : newly) {
      frozen[f] = 1;
      for (auto r : uses[f]) remaining[r] -= rate[f];
    }
  }

  Allocation out;
  for (std::size_t f = 0; f < nf; ++f) out[flows[f].id] = rate[f];
  return out;
}

double flow_rtt_ms(const Topology& t, const Path& p) {
  t.path_nodes(p);
  double sum = 0;
  for (const auto& h : p.hops) sum += t.link(h).latency_ms;
  return 2.0 * sum;
}

std::map<std::string, double> link_loads(const Topology& t, std::span<const TrafficFlow> flows, const Allocation& a) {
  std::vector<double> dir(t.links().size() * 2, 0.0);
  for (const auto& f : flows) {
    if (!f.path) continue;
    auto it = a.find(f.id);
    if (it == a.end()) continue;
    for (auto r : resources_of(t, *f.path)) dir[r] += it->second;
  }
  std::map<std::string, double> out;
  for (std::size_t l = 0; l < t.links().size(); ++l) out[t.links()[l].id] = std::max(dir[2 * l], dir[2 * l + 1]);
  return out;
}

}  // namespace sdnlab
