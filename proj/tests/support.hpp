#pragma once

// Independent oracles and seeded generators shared by the unit, property
// and acceptance tests. Nothing here calls into the code under test beyond
// reading topology data.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sdnlab/netsim.hpp"
#include "sdnlab/topo.hpp"

namespace testsupport {

inline std::filesystem::path scenario_dir() { return SDNLAB_SCENARIO_DIR; }

/// Uniform integer in [lo, hi] without std distributions.
inline long long pick(std::mt19937_64& rng, long long lo, long long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return lo + static_cast<long long>(v % span);
}

inline sdnlab::Node make_switch(const std::string& id, const std::string& domain = "d") {
  return sdnlab::Node{id, sdnlab::NodeKind::Switch, domain, {}, 0};
}

inline sdnlab::Node make_host(const std::string& id, const std::string& domain = "d") {
  return sdnlab::Node{id, sdnlab::NodeKind::Host, domain, {}, 0};
}

inline sdnlab::Link make_link(const std::string& id, const std::string& a, const std::string& b, double cap,
                              double lat, double eff = 1.0, sdnlab::LinkKind kind = sdnlab::LinkKind::DirectL2) {
  sdnlab::Link l;
  l.id = id;
  l.a = a;
  l.b = b;
  l.capacity_mbps = cap;
  l.latency_ms = lat;
  l.kind = kind;
  l.efficiency = eff;
  return l;
}

/// Connected random graph: `switches` switches (spanning tree plus
/// `extra` random links, parallel links allowed) and two hosts h0, h1 on
/// distinct switches. Integer latencies keep path sums exact.
inline sdnlab::Topology random_topology(std::mt19937_64& rng, int switches, int extra) {
  std::vector<sdnlab::Node> nodes;
  std::vector<sdnlab::Link> links;
  for (int i = 0; i < switches; ++i) nodes.push_back(make_switch("s" + std::to_string(i)));
  int next = 0;
  auto add = [&](int a, int b) {
    links.push_back(make_link("L" + std::to_string(next++), "s" + std::to_string(a), "s" + std::to_string(b),
                              static_cast<double>(pick(rng, 1, 20) * 50), static_cast<double>(pick(rng, 1, 9))));
  };
  for (int i = 1; i < switches; ++i) add(static_cast<int>(pick(rng, 0, i - 1)), i);
  for (int e = 0; e < extra; ++e) {
    int a = static_cast<int>(pick(rng, 0, switches - 1));
    int b = static_cast<int>(pick(rng, 0, switches - 1));
    if (a == b) b = (a + 1) % switches;
    add(a, b);
  }
  const int sa = static_cast<int>(pick(rng, 0, switches - 1));
  int sb = static_cast<int>(pick(rng, 0, switches - 1));
  if (sb == sa) sb = (sa + 1) % switches;
  nodes.push_back(make_host("h0"));
  nodes.push_back(make_host("h1"));
  links.push_back(make_link("a0", "h0", "s" + std::to_string(sa), 10000, 1));
  links.push_back(make_link("a1", "h1", "s" + std::to_string(sb), 10000, 1));
  return sdnlab::Topology(std::move(nodes), std::move(links));
}

/// Every simple path from src to dst, never passing through a host.
inline std::vector<sdnlab::Path> all_simple_paths(const sdnlab::Topology& t, const std::string& src,
                                                  const std::string& dst, const sdnlab::LinkSet& excluded = {}) {
  std::vector<sdnlab::Path> out;
  std::set<std::string> visited{src};
  std::vector<std::string> hops;
  auto dfs = [&](auto&& self, const std::string& at) -> void {
    if (at == dst) {
      out.push_back(sdnlab::Path{src, dst, hops});
      return;
    }
    if (at != src && t.node(at).kind == sdnlab::NodeKind::Host) return;
    for (const auto& l : t.links()) {
      if (excluded.count(l.id)) continue;
      std::string next;
      if (l.a == at) next = l.b;
      else if (l.b == at) next = l.a;
      else continue;
      if (visited.count(next)) continue;
      visited.insert(next);
      hops.push_back(l.id);
      self(self, next);
      hops.pop_back();
      visited.erase(next);
    }
  };
  dfs(dfs, src);
  return out;
}

inline double latency_of(const sdnlab::Topology& t, const sdnlab::Path& p) {
  double s = 0;
  for (const auto& h : p.hops) s += t.link(h).latency_ms;
  return s;
}

/// Sorts by (metric, total latency, link-id sequence).
inline void sort_paths(const sdnlab::Topology& t, std::vector<sdnlab::Path>& ps, sdnlab::PathMetric m) {
  std::sort(ps.begin(), ps.end(), [&](const sdnlab::Path& a, const sdnlab::Path& b) {
    const double la = latency_of(t, a), lb = latency_of(t, b);
    const double ka = m == sdnlab::PathMetric::Hops ? static_cast<double>(a.hops.size()) : la;
    const double kb = m == sdnlab::PathMetric::Hops ? static_cast<double>(b.hops.size()) : lb;
    if (ka != kb) return ka < kb;
    if (la != lb) return la < lb;
    return a.hops < b.hops;
  });
}

struct OracleFlow {
  std::string id;
  std::vector<std::pair<std::string, int>> resources;  // (link id, direction)
  double cap = std::numeric_limits<double>::infinity();
  bool blocked = false;  // crosses a down link
};

inline OracleFlow oracle_flow(const sdnlab::Topology& t, const sdnlab::TrafficFlow& f, const sdnlab::LinkSet& down) {
  OracleFlow o;
  o.id = f.id;
  if (f.per_stream_cap_mbps) o.cap = *f.per_stream_cap_mbps;
  std::string at = f.path->src;
  for (const auto& h : f.path->hops) {
    const auto& l = t.link(h);
    o.resources.emplace_back(h, at == l.a ? 0 : 1);
    o.blocked = o.blocked || down.count(h) != 0;
    at = l.other(at);
  }
  return o;
}

/// Progressive filling in small uniform increments: every unfrozen flow
/// grows by the largest step no resource or cap forbids; flows touching a
/// saturated resource or their cap freeze.
inline std::map<std::string, double> waterfill_oracle(const sdnlab::Topology& t,
                                                      const std::vector<sdnlab::TrafficFlow>& flows,
                                                      const sdnlab::LinkSet& down = {}) {
  std::vector<OracleFlow> fs;
  for (const auto& f : flows) fs.push_back(oracle_flow(t, f, down));
  std::map<std::pair<std::string, int>, double> cap;
  for (const auto& f : fs) {
    for (const auto& r : f.resources) cap[r] = t.link(r.first).usable_mbps();
  }
  std::vector<double> rate(fs.size(), 0.0);
  std::vector<char> frozen(fs.size(), 0);
  for (std::size_t i = 0; i < fs.size(); ++i) frozen[i] = fs[i].blocked || fs[i].cap <= 0;
  auto used = [&](const std::pair<std::string, int>& r) {
    double u = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (std::find(fs[i].resources.begin(), fs[i].resources.end(), r) != fs[i].resources.end()) u += rate[i];
    }
    return u;
  };
  for (int guard = 0; guard < 10000; ++guard) {
    if (std::all_of(frozen.begin(), frozen.end(), [](char c) { return c != 0; })) break;
    double delta = std::numeric_limits<double>::infinity();
    for (const auto& [r, c] : cap) {
      int n = 0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!frozen[i] && std::find(fs[i].resources.begin(), fs[i].resources.end(), r) != fs[i].resources.end()) ++n;
      }
      if (n > 0) delta = std::min(delta, (c - used(r)) / n);
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (!frozen[i]) delta = std::min(delta, fs[i].cap - rate[i]);
    }
    delta = std::max(delta, 0.0);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (!frozen[i]) rate[i] += delta;
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (frozen[i]) continue;
      if (std::isfinite(fs[i].cap) && fs[i].cap - rate[i] <= 1e-9 * std::max(1.0, fs[i].cap)) frozen[i] = 1;
      for (const auto& r : fs[i].resources) {
        if (cap[r] - used(r) <= 1e-9 * std::max(1.0, cap[r])) frozen[i] = 1;
      }
    }
  }
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < fs.size(); ++i) out[fs[i].id] = rate[i];
  return out;
}

/// Random instance: at most 6 links and 6 flows on random simple paths.
inline std::pair<sdnlab::Topology, std::vector<sdnlab::TrafficFlow>> random_instance(std::mt19937_64& rng) {
  const int switches = static_cast<int>(pick(rng, 2, 4));
  std::vector<sdnlab::Node> nodes;
  std::vector<sdnlab::Link> links;
  for (int i = 0; i < switches; ++i) nodes.push_back(make_switch("s" + std::to_string(i)));
  const int n_links = static_cast<int>(pick(rng, switches - 1, 6));
  for (int i = 0; i < n_links; ++i) {
    int a = i < switches - 1 ? i + 1 : static_cast<int>(pick(rng, 0, switches - 1));
    int b = i < switches - 1 ? static_cast<int>(pick(rng, 0, i)) : static_cast<int>(pick(rng, 0, switches - 1));
    if (a == b) b = (a + 1) % switches;
    const double eff = pick(rng, 0, 1) != 0 ? 0.94 : 1.0;
    links.push_back(make_link("L" + std::to_string(i), "s" + std::to_string(a), "s" + std::to_string(b),
                              static_cast<double>(pick(rng, 1, 100) * 10), 1, eff));
  }
  sdnlab::Topology t(std::move(nodes), std::move(links));
  std::vector<sdnlab::TrafficFlow> flows;
  const int n_flows = static_cast<int>(pick(rng, 1, 6));
  for (int i = 0; i < n_flows; ++i) {
    std::vector<sdnlab::Path> ps;
    while (ps.empty()) {
      auto a = "s" + std::to_string(pick(rng, 0, switches - 1));
      auto b = "s" + std::to_string(pick(rng, 0, switches - 1));
      if (a != b) ps = all_simple_paths(t, a, b);
    }
    auto p = ps[static_cast<std::size_t>(pick(rng, 0, static_cast<long long>(ps.size()) - 1))];
    std::optional<double> cap;
    if (pick(rng, 0, 2) == 0) cap = static_cast<double>(pick(rng, 1, 600));
    sdnlab::TrafficFlow f;
    f.id = "f" + std::to_string(i);
    f.src = p.src;
    f.dst = p.dst;
    f.path = p;
    f.per_stream_cap_mbps = cap;
    flows.push_back(std::move(f));
  }
  return {std::move(t), std::move(flows)};
}


}  // namespace testsupport
