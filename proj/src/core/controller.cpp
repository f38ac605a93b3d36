#include "sdnlab/controller.hpp"

#include <algorithm>

#include "sdnlab/error.hpp"

namespace sdnlab {

AddressBook AddressBook::from_topology(const Topology& t) {
  AddressBook b;
  for (const auto& n : t.nodes()) {
    if (n.kind == NodeKind::Host) b.add(n.ip, n.id);
  }
  return b;
}

const std::string* AddressBook::lookup(Ipv4 ip) const {
  auto it = hosts_.find(ip.value);
  return it == hosts_.end() ? nullptr : &it->second;
}

std::vector<Directive> install_path(const Topology& t, const Path& p, const MatchPattern& m, std::string_view owner,
                                    std::string_view cookie, int priority) {
  if (m.empty()) throw Error(ErrorKind::Validation, "install_path needs a non-empty match");
  auto nodes = t.path_nodes(p);
  if (t.node(p.dst).kind != NodeKind::Host) {
    throw Error(ErrorKind::Validation, "path " + p.str() + " is not host-terminated at '" + p.dst + "'");
  }
  std::vector<Directive> out;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (t.node(nodes[i]).kind != NodeKind::Switch) continue;
    FlowEntry e;
    e.priority = priority;
    e.match = m;
    e.actions = {OutputAction{t.port_of(nodes[i], p.hops[i])}};
    e.cookie = std::string(cookie);
    e.owner = std::string(owner);
    out.emplace_back(InstallDirective{nodes[i], std::move(e)});
  }
  return out;
}

double LinkMonitor::smooth(const std::string& link, double used) {
  auto [it, fresh] = smoothed_.try_emplace(link, used);
  if (!fresh) it->second = alpha_ * used + (1.0 - alpha_) * it->second;
  return it->second;
}

std::vector<ControllerEventBody> LinkMonitor::sample(const Topology& t, std::span<const TrafficFlow> flows,
                                                     const Allocation& a, const LinkSet& down) {
  std::vector<ControllerEventBody> out;
  auto loads = link_loads(t, flows, a);
  for (const auto& l : t.links()) {
    if (down.count(l.id)) continue;
    const double used = smooth(l.id, loads.at(l.id));
    out.emplace_back(LinkStats{l.id, used, l.usable_mbps() - used, 2.0 * l.latency_ms});
  }
  for (const auto& f : flows) {
    if (!f.path) continue;
    auto it = a.find(f.id);
    out.emplace_back(FlowStats{f.id, it == a.end() ? 0.0 : it->second});
  }
  return out;
}

BaselineController::BaselineController(const Topology& t, AddressBook book, std::string owner)
    : topo_(t), book_(std::move(book)), owner_(std::move(owner)) {}

std::vector<Directive> BaselineController::handle_event(const ControllerEvent& e) {
  if (auto* pi = std::get_if<PacketIn>(&e.body)) return on_packet_in(*pi, e.epoch);
  if (auto* fe = std::get_if<FlowEnded>(&e.body)) return unroute(fe->flow);
  if (auto* ps = std::get_if<PortStatus>(&e.body)) {
    if (ps->up) {
      down_.erase(ps->link);
      return on_other(e);
    }
    down_.insert(ps->link);
    std::vector<Directive> out;
    std::vector<std::string> affected;
    for (const auto& [flow, r] : routes_) {
      if (std::find(r.path.hops.begin(), r.path.hops.end(), ps->link) != r.path.hops.end()) affected.push_back(flow);
    }
    for (const auto& flow : affected) {
      const Route r = routes_.at(flow);
      auto alt = failover_path(flow, r);
      if (!alt) continue;
      auto rm = unroute(flow);
      auto add = route(flow, r.header, *alt, e.epoch);
      out.insert(out.end(), rm.begin(), rm.end());
      out.insert(out.end(), add.begin(), add.end());
    }
    auto more = on_other(e);
    out.insert(out.end(), more.begin(), more.end());
    return out;
  }
  return on_other(e);
}

std::vector<Directive> BaselineController::on_packet_in(const PacketIn& pi, int epoch) {
  if (routes_.count(pi.flow)) return {};
  auto ends = endpoints(pi.header);
  if (!ends) return {};
  auto p = shortest(ends->first, ends->second);
  if (!p) return {};
  return route(pi.flow, pi.header, *p, epoch);
}

std::vector<Directive> BaselineController::on_other(const ControllerEvent&) { return {}; }

std::optional<Path> BaselineController::failover_path(const std::string&, const Route& r) {
  return shortest(r.path.src, r.path.dst);
}

std::vector<Directive> BaselineController::route(const std::string& flow, const HeaderTuple& h, const Path& path,
                                                 int epoch) {
  const std::string cookie = "f/" + flow;
  auto out = install_path(topo_, path, MatchPattern::five_tuple(h), owner_, cookie);
  out.emplace_back(RouteFlowDirective{flow, path});
  routes_[flow] = Route{h, path, cookie, epoch};
  return out;
}

std::vector<Directive> BaselineController::unroute(const std::string& flow) {
  auto it = routes_.find(flow);
  if (it == routes_.end()) return {};
  std::vector<Directive> out;
  auto nodes = topo_.path_nodes(it->second.path);
  for (const auto& n : nodes) {
    if (topo_.node(n).kind == NodeKind::Switch) out.emplace_back(RemoveDirective{n, it->second.cookie});
  }
  routes_.erase(it);
  return out;
}

std::optional<Path> BaselineController::shortest(const std::string& src, const std::string& dst) const {
  if (src == dst) return std::nullopt;
  auto ps = k_shortest_paths(topo_, src, dst, 1, PathMetric::Hops, down_);
  if (ps.empty()) return std::nullopt;
  return ps.front();
}

std::optional<std::pair<std::string, std::string>> BaselineController::endpoints(const HeaderTuple& h) const {
  const auto* s = book_.lookup(h.ip_src);
  const auto* d = book_.lookup(h.ip_dst);
  if (s == nullptr || d == nullptr) return std::nullopt;
  return std::make_pair(*s, *d);
}

}  // namespace sdnlab
