#include "sdnlab/topo.hpp"

#include <algorithm>
#include <limits>

#include "json_util.hpp"
#include "sdnlab/error.hpp"

namespace sdnlab {

std::string_view to_string(NodeKind k) { return k == NodeKind::Switch ? "switch" : "host"; }

std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::DirectL2: return "direct_l2";
    case LinkKind::Gre: return "gre";
    case LinkKind::Overlay: return "overlay";
  }
  return "?";
}

double default_efficiency(LinkKind k) { return k == LinkKind::DirectL2 ? 0.94 : 1.0; }

std::string Path::str() const {
  std::string out;
  for (const auto& h : hops) {
    if (!out.empty()) out += ';';
    out += h;
  }
  return out;
}

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  std::uint32_t next_host = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (n.id.empty()) throw Error(ErrorKind::Validation, "node with empty id");
    if (n.domain.empty()) throw Error(ErrorKind::Validation, "node '" + n.id + "' has no domain");
    if (!node_index_.emplace(n.id, i).second) throw Error(ErrorKind::Validation, "duplicate node id '" + n.id + "'");
    if (n.kind == NodeKind::Host) {
      ++next_host;
      if (n.ip.value == 0) n.ip = Ipv4{(10u << 24) + next_host};
      if (n.mac == 0) n.mac = 0x020000000000ull + next_host;
      if (!host_ip_index_.emplace(n.ip.value, i).second) {
        throw Error(ErrorKind::Validation, "duplicate host address " + n.ip.str() + " on '" + n.id + "'");
      }
    }
  }
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    if (l.id.empty()) throw Error(ErrorKind::Validation, "link with empty id");
    if (!link_index_.emplace(l.id, i).second) throw Error(ErrorKind::Validation, "duplicate link id '" + l.id + "'");
    for (const auto* end : {&l.a, &l.b}) {
      if (!node_index_.count(*end)) {
        throw Error(ErrorKind::Validation, "link '" + l.id + "' references unknown node '" + *end + "'");
      }
    }
    if (l.a == l.b) throw Error(ErrorKind::Validation, "link '" + l.id + "' is a self-loop");
    if (!(l.capacity_mbps > 0)) throw Error(ErrorKind::Validation, "link '" + l.id + "' needs capacity_mbps > 0");
    if (!(l.latency_ms >= 0)) throw Error(ErrorKind::Validation, "link '" + l.id + "' needs latency_ms >= 0");
    if (!(l.efficiency > 0 && l.efficiency <= 1)) {
      throw Error(ErrorKind::Validation, "link '" + l.id + "' needs efficiency in (0, 1]");
    }
    auto ia = node_index_.at(l.a);
    auto ib = node_index_.at(l.b);
    adjacency_[ia].push_back({i, ib, static_cast<std::uint32_t>(adjacency_[ia].size() + 1)});
    adjacency_[ib].push_back({i, ia, static_cast<std::uint32_t>(adjacency_[ib].size() + 1)});
  }
}

Topology Topology::from_json(const nlohmann::json& nodes, const nlohmann::json& links) {
  using namespace detail;
  if (!nodes.is_array()) throw Error(ErrorKind::Validation, "nodes: expected an array");
  if (!links.is_array()) throw Error(ErrorKind::Validation, "links: expected an array");
  std::vector<Node> ns;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto where = "nodes[" + std::to_string(i) + "]";
    const auto& j = nodes[i];
    check_keys(j, where, {"id", "kind", "domain"}, {"ip"});
    Node n;
    n.id = get_string(j, "id", where);
    auto kind = get_string(j, "kind", where);
    if (kind == "switch") n.kind = NodeKind::Switch;
    else if (kind == "host") n.kind = NodeKind::Host;
    else throw Error(ErrorKind::Validation, where + ".kind: unknown node kind '" + kind + "'");
    n.domain = get_string(j, "domain", where);
    if (j.contains("ip")) {
      if (n.kind != NodeKind::Host) throw Error(ErrorKind::Validation, where + ".ip: only hosts carry an address");
      try {
        n.ip = Ipv4::parse(get_string(j, "ip", where));
      } catch (const Error& e) {
        throw Error(ErrorKind::Validation, where + ".ip: " + e.what());
      }
    }
    ns.push_back(std::move(n));
  }
  std::vector<Link> ls;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto where = "links[" + std::to_string(i) + "]";
    const auto& j = links[i];
    check_keys(j, where, {"id", "a", "b", "capacity_mbps", "latency_ms", "kind"}, {"efficiency"});
    Link l;
    l.id = get_string(j, "id", where);
    l.a = get_string(j, "a", where);
    l.b = get_string(j, "b", where);
    l.capacity_mbps = get_number(j, "capacity_mbps", where);
    l.latency_ms = get_number(j, "latency_ms", where);
    auto kind = get_string(j, "kind", where);
    if (kind == "direct_l2") l.kind = LinkKind::DirectL2;
    else if (kind == "gre") l.kind = LinkKind::Gre;
    else if (kind == "overlay") l.kind = LinkKind::Overlay;
    else throw Error(ErrorKind::Validation, where + ".kind: unknown link kind '" + kind + "'");
    l.efficiency = j.contains("efficiency") ? get_number(j, "efficiency", where) : default_efficiency(l.kind);
    ls.push_back(std::move(l));
  }
  return Topology(std::move(ns), std::move(ls));
}

const Node& Topology::node(std::string_view id) const { return nodes_[node_index(id)]; }
const Link& Topology::link(std::string_view id) const { return links_[link_index(id)]; }

std::size_t Topology::node_index(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  if (it == node_index_.end()) throw Error(ErrorKind::UnknownEntity, "unknown node '" + std::string(id) + "'");
  return it->second;
}

std::size_t Topology::link_index(std::string_view id) const {
  auto it = link_index_.find(std::string(id));
  if (it == link_index_.end()) throw Error(ErrorKind::UnknownEntity, "unknown link '" + std::string(id) + "'");
  return it->second;
}

std::uint32_t Topology::port_of(std::string_view node, std::string_view link_id) const {
  auto li = link_index(link_id);
  for (const auto& inc : adjacency_[node_index(node)]) {
    if (inc.link == li) return inc.port;
  }
  throw Error(ErrorKind::UnknownEntity, "link '" + std::string(link_id) + "' is not attached to '" + std::string(node) + "'");
}

const Link* Topology::link_at_port(std::string_view node, std::uint32_t port) const {
  const auto& adj = adjacency_[node_index(node)];
  if (port == 0 || port > adj.size()) return nullptr;
  return &links_[adj[port - 1].link];
}

const Node* Topology::host_by_ip(Ipv4 ip) const {
  auto it = host_ip_index_.find(ip.value);
  return it == host_ip_index_.end() ? nullptr : &nodes_[it->second];
}

std::vector<std::string> Topology::hosts_attached_to(std::string_view sw) const {
  std::vector<std::string> out;
  for (const auto& inc : adjacency_[node_index(sw)]) {
    if (nodes_[inc.neighbor].kind == NodeKind::Host) out.push_back(nodes_[inc.neighbor].id);
  }
  return out;
}

std::vector<std::string> Topology::path_nodes(const Path& p) const {
  if (p.hops.empty()) throw Error(ErrorKind::Validation, "path " + p.src + "->" + p.dst + " has no hops");
  node_index(p.src);
  node_index(p.dst);
  std::vector<std::string> seq{p.src};
  for (const auto& hop : p.hops) {
    const auto& l = link(hop);
    const auto& cur = seq.back();
    if (l.a != cur && l.b != cur) {
      throw Error(ErrorKind::Validation, "path hop '" + hop + "' does not continue from '" + cur + "'");
    }
    if (seq.size() > 1 && node(cur).kind == NodeKind::Host) {
      throw Error(ErrorKind::Validation, "path transits host '" + cur + "'");
    }
    const auto& next = l.other(cur);
    if (std::find(seq.begin(), seq.end(), next) != seq.end()) {
      throw Error(ErrorKind::Validation, "path revisits node '" + next + "'");
    }
    seq.push_back(next);
  }
  if (seq.back() != p.dst) throw Error(ErrorKind::Validation, "path ends at '" + seq.back() + "', not '" + p.dst + "'");
  return seq;
}

Topology load_topology(std::string_view text) {
  auto j = detail::parse_json(text, "topology");
  detail::check_keys(j, "topology", {"nodes", "links"}, {"name", "description"});
  return Topology::from_json(j.at("nodes"), j.at("links"));
}

namespace {

struct Key {
  double primary = 0;
  double latency = 0;
};

struct Label {
  Key key;
  std::vector<std::size_t> seq;  // link indices
  bool set = false;
};

/// Compares (primary, latency, link-id sequence) lexicographically.
bool label_less(const Topology& t, const Key& ka, const std::vector<std::size_t>& sa, const Key& kb,
                const std::vector<std::size_t>& sb) {
  if (ka.primary != kb.primary) return ka.primary < kb.primary;
  if (ka.latency != kb.latency) return ka.latency < kb.latency;
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end(), [&](std::size_t x, std::size_t y) {
    return t.links()[x].id < t.links()[y].id;
  });
}

/// Dijkstra over (metric, latency, lexicographic hops) labels. Labels are tree
/// paths, so the lexicographic component stays consistent under extension.
std::optional<std::vector<std::size_t>> best_path(const Topology& t, std::size_t src, std::size_t dst,
                                                  PathMetric metric, const std::vector<char>& link_blocked,
                                                  const std::vector<char>& node_blocked) {
  const auto n = t.nodes().size();
  std::vector<Label> label(n);
  std::vector<char> done(n, 0);
  label[src].set = true;
  while (true) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!label[v].set || done[v]) continue;
      if (u == n || label_less(t, label[v].key, label[v].seq, label[u].key, label[u].seq)) u = v;
    }
    if (u == n) return std::nullopt;
    if (u == dst) return label[u].seq;
    done[u] = 1;
    if (u != src && t.nodes()[u].kind == NodeKind::Host) continue;
    for (const auto& inc : t.incident(u)) {
      if (link_blocked[inc.link] || node_blocked[inc.neighbor] || done[inc.neighbor]) continue;
      const auto& l = t.links()[inc.link];
      Key k = label[u].key;
      k.primary += metric == PathMetric::Hops ? 1.0 : l.latency_ms;
      k.latency += l.latency_ms;
      auto seq = label[u].seq;
      seq.push_back(inc.link);
      auto& cur = label[inc.neighbor];
      if (!cur.set || label_less(t, k, seq, cur.key, cur.seq)) {
        cur.key = k;
        cur.seq = std::move(seq);
        cur.set = true;
      }
    }
  }
}

Key path_key(const Topology& t, const Path& p, PathMetric metric) {
  Key k;
  for (const auto& h : p.hops) {
    const auto& l = t.link(h);
    k.primary += metric == PathMetric::Hops ? 1.0 : l.latency_ms;
    k.latency += l.latency_ms;
  }
  return k;
}

Path to_path(const Topology& t, std::string_view src, std::string_view dst, const std::vector<std::size_t>& seq) {
  Path p{std::string(src), std::string(dst), {}};
  for (auto li : seq) p.hops.push_back(t.links()[li].id);
  return p;
}

void check_endpoints(const Topology& t, std::string_view src, std::string_view dst) {
  t.node_index(src);
  t.node_index(dst);
  if (src == dst) throw Error(ErrorKind::Validation, "source and destination are both '" + std::string(src) + "'");
}

std::vector<char> blocked_links(const Topology& t, const LinkSet& excluded) {
  std::vector<char> b(t.links().size(), 0);
  for (const auto& id : excluded) {
    if (t.has_link(id)) b[t.link_index(id)] = 1;
  }
  return b;
}

}  // namespace

bool path_less(const Topology& t, const Path& a, const Path& b, PathMetric metric) {
  auto ka = path_key(t, a, metric);
  auto kb = path_key(t, b, metric);
  if (ka.primary != kb.primary) return ka.primary < kb.primary;
  if (ka.latency != kb.latency) return ka.latency < kb.latency;
  return a.hops < b.hops;
}

std::vector<Path> k_shortest_paths(const Topology& t, std::string_view src, std::string_view dst, std::size_t k,
                                   PathMetric metric, const LinkSet& excluded) {
  check_endpoints(t, src, dst);
  if (k == 0) throw Error(ErrorKind::Validation, "k must be positive");
  const auto s = t.node_index(src);
  const auto d = t.node_index(dst);
  const auto base_links = blocked_links(t, excluded);
  const std::vector<char> no_nodes(t.nodes().size(), 0);

  std::vector<Path> accepted;
  auto first = best_path(t, s, d, metric, base_links, no_nodes);
  if (!first) return accepted;
  accepted.push_back(to_path(t, src, dst, *first));

  auto cand_less = [&](const Path& a, const Path& b) { return path_less(t, a, b, metric); };
  std::vector<Path> candidates;

  while (accepted.size() < k) {
    const Path& prev = accepted.back();
    const auto prev_nodes = t.path_nodes(prev);
    for (std::size_t i = 0; i < prev.hops.size(); ++i) {
      const auto spur = t.node_index(prev_nodes[i]);
      std::vector<std::string> root(prev.hops.begin(), prev.hops.begin() + static_cast<std::ptrdiff_t>(i));
      auto links = base_links;
      for (const auto& p : accepted) {
        if (p.hops.size() > i && std::equal(root.begin(), root.end(), p.hops.begin())) {
          links[t.link_index(p.hops[i])] = 1;
        }
      }
      std::vector<char> nodes(t.nodes().size(), 0);
      for (std::size_t j = 0; j < i; ++j) nodes[t.node_index(prev_nodes[j])] = 1;
      auto spur_seq = best_path(t, spur, d, metric, links, nodes);
      if (!spur_seq) continue;
      Path cand{std::string(src), std::string(dst), root};
      for (auto li : *spur_seq) cand.hops.push_back(t.links()[li].id);
      bool seen = std::find(accepted.begin(), accepted.end(), cand) != accepted.end() ||
                  std::find(candidates.begin(), candidates.end(), cand) != candidates.end();
      if (!seen) candidates.push_back(std::move(cand));
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), cand_less);
    accepted.push_back(std::move(*best));
    candidates.erase(best);
  }
  return accepted;
}

std::vector<Path> max_disjoint_paths(const Topology& t, std::string_view src, std::string_view dst,
                                     const LinkSet& excluded, const LinkSet& shareable) {
  check_endpoints(t, src, dst);
  const auto s = t.node_index(src);
  const auto d = t.node_index(dst);
  auto links = blocked_links(t, excluded);
  const std::vector<char> no_nodes(t.nodes().size(), 0);
  std::vector<Path> out;
  while (auto seq = best_path(t, s, d, PathMetric::Hops, links, no_nodes)) {
    bool blocked_any = false;
    for (auto li : *seq) {
      if (shareable.count(t.links()[li].id)) continue;
      links[li] = 1;
      blocked_any = true;
    }
    out.push_back(to_path(t, src, dst, *seq));
    if (!blocked_any) break;  // nothing left to make the next path differ
  }
  return out;
}

PathMetrics path_metrics(const Topology& t, const Path& p) {
  t.path_nodes(p);
  PathMetrics m;
  m.bottleneck_mbps = std::numeric_limits<double>::infinity();
  for (const auto& h : p.hops) {
    const auto& l = t.link(h);
    m.bottleneck_mbps = std::min(m.bottleneck_mbps, l.capacity_mbps);
    m.total_latency_ms += l.latency_ms;
  }
  m.hop_count = p.hops.size();
  return m;
}

}  // namespace sdnlab
