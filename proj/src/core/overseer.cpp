#include "sdnlab/overseer.hpp"

#include <algorithm>
#include <limits>

#include "sdnlab/error.hpp"

namespace sdnlab {

FlowClass classify_flow(const HeaderTuple& h, const std::vector<AppDeclaration>& declarations,
                        const BulkPortList& bulk) {
  const AppDeclaration* best = nullptr;
  for (const auto& d : declarations) {
    if (!d.match.matches(h)) continue;
    // later declarations override on equal specificity
    if (best == nullptr || d.match.specified_fields() >= best->match.specified_fields()) best = &d;
  }
  if (best != nullptr) return best->cls;
  return bulk.contains(h.tp_dst) ? FlowClass::BandwidthIntensive : FlowClass::LatencyOriented;
}

PathScore score_path(const Topology& t, const StatsView& stats, const Path& p,
                     const std::map<std::string, double>& credit) {
  t.path_nodes(p);
  PathScore s{p, std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& h : p.hops) {
    const auto& l = t.link(h);
    auto it = stats.find(h);
    double residual = it != stats.end() ? it->second.residual_mbps : l.usable_mbps();
    double rtt = it != stats.end() ? it->second.rtt_ms : 2.0 * l.latency_ms;
    if (auto c = credit.find(h); c != credit.end()) residual += c->second;
    s.residual_bottleneck_mbps = std::min(s.residual_bottleneck_mbps, residual);
    s.total_rtt_ms += rtt;
  }
  return s;
}

bool better_for_class(const PathScore& a, const PathScore& b, FlowClass c) {
  if (c == FlowClass::BandwidthIntensive) {
    if (a.residual_bottleneck_mbps != b.residual_bottleneck_mbps) {
      return a.residual_bottleneck_mbps > b.residual_bottleneck_mbps;
    }
    if (a.total_rtt_ms != b.total_rtt_ms) return a.total_rtt_ms < b.total_rtt_ms;
  } else {
    if (a.total_rtt_ms != b.total_rtt_ms) return a.total_rtt_ms < b.total_rtt_ms;
    if (a.residual_bottleneck_mbps != b.residual_bottleneck_mbps) {
      return a.residual_bottleneck_mbps > b.residual_bottleneck_mbps;
    }
  }
  return a.path.hops < b.path.hops;
}

namespace {

std::optional<PathScore> best_candidate(const Topology& t, const StatsView& stats, std::string_view src,
                                        std::string_view dst, FlowClass c, std::size_t k, const LinkSet& excluded,
                                        const std::map<std::string, double>& credit = {}) {
  std::optional<PathScore> best;
  for (const auto& p : k_shortest_paths(t, src, dst, k, PathMetric::Hops, excluded)) {
    auto s = score_path(t, stats, p, credit);
    if (!best || better_for_class(s, *best, c)) best = std::move(s);
  }
  return best;
}

}  // namespace

Path select_path(const Topology& t, const StatsView& stats, std::string_view src, std::string_view dst, FlowClass c,
                 const LinkSet& excluded) {
  auto best = best_candidate(t, stats, src, dst, c, 8, excluded);
  if (!best) throw Error(ErrorKind::Validation, "no path from '" + std::string(src) + "' to '" + std::string(dst) + "'");
  return best->path;
}

OverseerController::OverseerController(const Topology& t, AddressBook book, OverseerConfig cfg, std::string owner)
    : BaselineController(t, std::move(book), std::move(owner)), cfg_(std::move(cfg)) {}

FlowClass OverseerController::flow_class(const std::string& flow) const {
  auto it = classes_.find(flow);
  return it == classes_.end() ? FlowClass::Unclassified : it->second;
}

std::vector<Directive> OverseerController::on_packet_in(const PacketIn& pi, int epoch) {
  if (routes_.count(pi.flow)) return {};
  auto ends = endpoints(pi.header);
  if (!ends) return {};
  const auto cls = classify_flow(pi.header, declarations_, cfg_.bulk);
  classes_[pi.flow] = cls;
  auto best = best_candidate(topo_, stats_, ends->first, ends->second, cls, cfg_.candidates, down_);
  if (!best) return {};
  return route(pi.flow, pi.header, best->path, epoch);
}

std::vector<Directive> OverseerController::on_other(const ControllerEvent& e) {
  if (auto* ls = std::get_if<LinkStats>(&e.body)) {
    stats_[ls->link] = LinkView{ls->residual_mbps, ls->rtt_ms};
  } else if (auto* fs = std::get_if<FlowStats>(&e.body)) {
    flow_rates_[fs->flow] = fs->rate_mbps;
  } else if (auto* d = std::get_if<AppDeclaration>(&e.body)) {
    declarations_.push_back(*d);
  } else if (auto* tick = std::get_if<EpochTick>(&e.body)) {
    return reroute(tick->epoch);
  }
  return {};
}

std::optional<Path> OverseerController::failover_path(const std::string& flow, const Route& r) {
  auto best = best_candidate(topo_, stats_, r.path.src, r.path.dst, flow_class(flow), cfg_.candidates, down_);
  if (!best) return std::nullopt;
  return best->path;
}

std::vector<Directive> OverseerController::reroute(int epoch) {
  std::vector<Directive> out;
  std::vector<std::pair<std::string, Path>> moves;
  for (const auto& [flow, r] : routes_) {
    if (epoch - r.since_epoch < cfg_.dwell_epochs) continue;
    const auto cls = flow_class(flow);
    std::map<std::string, double> credit;
    if (auto it = flow_rates_.find(flow); it != flow_rates_.end()) {
      for (const auto& h : r.path.hops) credit[h] = it->second;
    }
    const auto current = score_path(topo_, stats_, r.path, credit);
    auto best = best_candidate(topo_, stats_, r.path.src, r.path.dst, cls, cfg_.candidates, down_, credit);
    if (!best || best->path == r.path) continue;
    bool improves = false;
    if (cls == FlowClass::BandwidthIntensive) {
      const double cur = current.residual_bottleneck_mbps;
      improves = cur <= 0 ? best->residual_bottleneck_mbps > 0
                          : best->residual_bottleneck_mbps - cur >= cfg_.improvement * cur;
    } else {
      const double cur = current.total_rtt_ms;
      improves = cur > 0 && cur - best->total_rtt_ms >= cfg_.improvement * cur;
    }
    if (improves) moves.emplace_back(flow, best->path);
  }
  for (const auto& [flow, path] : moves) {
    const auto header = routes_.at(flow).header;
    auto rm = unroute(flow);
    auto add = route(flow, header, path, epoch);
    out.insert(out.end(), rm.begin(), rm.end());
    out.insert(out.end(), add.begin(), add.end());
  }
  return out;
}

}  // namespace sdnlab
