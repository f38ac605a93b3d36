#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sdnlab/net.hpp"

namespace sdnlab {

enum class NodeKind { Switch, Host };
enum class LinkKind { DirectL2, Gre, Overlay };

std::string_view to_string(NodeKind k);
std::string_view to_string(LinkKind k);

/// Default efficiency for a link kind: header overhead on direct L2 paths,
/// none on GRE whose nominal capacity is already the measured tunnel rate.
double default_efficiency(LinkKind k);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Switch;
  std::string domain;
  Ipv4 ip;             // hosts only; assigned sequentially when not given
  std::uint64_t mac = 0;  // hosts only
};

struct Link {
  std::string id;
  std::string a;
  std::string b;
  double capacity_mbps = 0;
  double latency_ms = 0;  // one-way
  LinkKind kind = LinkKind::DirectL2;
  double efficiency = 1.0;

  double usable_mbps() const { return capacity_mbps * efficiency; }
  const std::string& other(const std::string& n) const { return n == a ? b : a; }
};

struct Path {
  std::string src;
  std::string dst;
  std::vector<std::string> hops;  // link ids, src to dst

  std::string str() const;  // hops joined by ';'
  bool operator==(const Path&) const = default;
};

struct PathMetrics {
  double bottleneck_mbps = 0;
  double total_latency_ms = 0;
  std::size_t hop_count = 0;
};

enum class PathMetric { Hops, Latency };

using LinkSet = std::set<std::string>;

/// Immutable network graph. Ports on a node are numbered from 1 in the order
/// its incident links were declared.
class Topology {
 public:
  struct Incidence {
    std::size_t link;
    std::size_t neighbor;
    std::uint32_t port;
  };

  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Link> links);

  /// Builds from the `nodes` / `links` arrays of a scenario document.
  static Topology from_json(const nlohmann::json& nodes, const nlohmann::json& links);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }

  bool has_node(std::string_view id) const { return node_index_.count(std::string(id)) != 0; }
  bool has_link(std::string_view id) const { return link_index_.count(std::string(id)) != 0; }
  const Node& node(std::string_view id) const;
  const Link& link(std::string_view id) const;
  std::size_t node_index(std::string_view id) const;
  std::size_t link_index(std::string_view id) const;

  std::span<const Incidence> incident(std::size_t node) const { return adjacency_[node]; }

  /// Port on `node` that carries `link_id`.
  std::uint32_t port_of(std::string_view node, std::string_view link_id) const;
  /// Link attached to `port` of `node`, or nullptr.
  const Link* link_at_port(std::string_view node, std::uint32_t port) const;

  const Node* host_by_ip(Ipv4 ip) const;
  std::vector<std::string> hosts_attached_to(std::string_view sw) const;

  /// Validates the Path invariants and returns the visited node ids.
  std::vector<std::string> path_nodes(const Path& p) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<std::string, std::size_t> node_index_;
  std::map<std::string, std::size_t> link_index_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::map<std::uint32_t, std::size_t> host_ip_index_;
};

/// Parses a standalone topology document (`{"nodes":[...],"links":[...]}`).
/// Parse errors report line and column.
Topology load_topology(std::string_view text);

/// Up to k loop-free paths ordered by (metric, total latency, link-id
/// sequence). Hosts are endpoints only, never transit nodes.
std::vector<Path> k_shortest_paths(const Topology& t, std::string_view src, std::string_view dst, std::size_t k,
                                   PathMetric metric, const LinkSet& excluded = {});

/// Greedy link-disjoint paths: repeatedly extract the hop-shortest path and
/// remove its links. Links in `shareable` stay usable by later paths.
std::vector<Path> max_disjoint_paths(const Topology& t, std::string_view src, std::string_view dst,
                                     const LinkSet& excluded = {}, const LinkSet& shareable = {});

PathMetrics path_metrics(const Topology& t, const Path& p);

/// Strict weak order used by every path ranking in the library.
bool path_less(const Topology& t, const Path& a, const Path& b, PathMetric metric);

}  // namespace sdnlab
