#include "sdnlab/multipath.hpp"

#include <algorithm>

#include "sdnlab/error.hpp"

namespace sdnlab {

std::vector<Path> request_paths(const Topology& t, const TransferRequest& r, const LinkSet& excluded) {
  if (r.n_streams < 1 || r.requested_paths < 1) {
    throw Error(ErrorKind::Validation, "transfer '" + r.id + "' needs n_streams >= 1 and paths >= 1");
  }
  // A host's access links are unavoidable; only the rest must be disjoint.
  LinkSet access;
  for (const auto* end : {&r.src, &r.dst}) {
    if (t.node(*end).kind != NodeKind::Host) continue;
    for (const auto& inc : t.incident(t.node_index(*end))) access.insert(t.links()[inc.link].id);
  }
  auto paths = max_disjoint_paths(t, r.src, r.dst, excluded, access);
  if (paths.empty()) throw Error(ErrorKind::Validation, "transfer '" + r.id + "': no path from " + r.src + " to " + r.dst);
  if (paths.size() > static_cast<std::size_t>(r.requested_paths)) paths.resize(static_cast<std::size_t>(r.requested_paths));
  return paths;
}

const Path& assign_stream(const StripedTransfer& transfer, int stream_index) {
  if (transfer.paths.empty()) throw Error(ErrorKind::Validation, "transfer '" + transfer.request.id + "' has no paths");
  if (stream_index < 0) throw Error(ErrorKind::Validation, "negative stream index");
  return transfer.paths[static_cast<std::size_t>(stream_index) % transfer.paths.size()];
}

void rank_path_set(const Topology& t, std::vector<Path>& paths) {
  std::stable_sort(paths.begin(), paths.end(),
                   [&](const Path& a, const Path& b) { return path_less(t, a, b, PathMetric::Hops); });
}

namespace {

bool same_connection(const FiveTuple& token, const HeaderTuple& h) {
  return token.ip_src == h.ip_src && token.ip_dst == h.ip_dst && token.ip_proto == h.ip_proto &&
         token.tp_dst == h.tp_dst;
}

}  // namespace

PathSetRegistry::Entry& PathSetRegistry::on_mp_capable(const Topology& t, const HeaderTuple& h, std::string_view src,
                                                       std::string_view dst, const LinkSet& excluded, std::size_t k) {
  if (!h.has_option(kMpCapable)) throw Error(ErrorKind::Validation, "header lacks MP_CAPABLE");
  const auto token = FiveTuple::of(h);
  for (auto& e : entries_) {
    if (e.instance.token == token) return e;
  }
  auto paths = k_shortest_paths(t, src, dst, k, PathMetric::Hops, excluded);
  if (paths.empty()) {
    throw Error(ErrorKind::Validation, "no path for MPTCP instance " + token.str());
  }
  rank_path_set(t, paths);
  Entry e;
  e.instance.token = token;
  e.instance.subflows.emplace_back(token, paths.front());
  e.set.owner = token.str();
  e.set.paths = std::move(paths);
  e.set.cursor = 1;
  entries_.push_back(std::move(e));
  return entries_.back();
}

Path PathSetRegistry::on_mp_join(const HeaderTuple& h) {
  if (!h.has_option(kMpJoin)) throw Error(ErrorKind::Validation, "header lacks MP_JOIN");
  for (auto& e : entries_) {
    if (!same_connection(e.instance.token, h)) continue;
    const auto sub = FiveTuple::of(h);
    for (const auto& [tuple, path] : e.instance.subflows) {
      if (tuple == sub) return path;
    }
    Path p = e.set.paths[e.set.cursor % e.set.paths.size()];
    ++e.set.cursor;
    e.instance.subflows.emplace_back(sub, p);
    return p;
  }
  throw Error(ErrorKind::UnknownEntity, "MP_JOIN " + FiveTuple::of(h).str() + " matches no MPTCP instance");
}

const PathSetRegistry::Entry* PathSetRegistry::find_instance(const HeaderTuple& h) const {
  for (const auto& e : entries_) {
    if (same_connection(e.instance.token, h)) return &e;
  }
  return nullptr;
}

GridFtpController::GridFtpController(const Topology& t, AddressBook book, std::string owner)
    : BaselineController(t, std::move(book), std::move(owner)) {}

std::vector<Directive> GridFtpController::on_other(const ControllerEvent& e) {
  if (auto* req = std::get_if<TransferRequest>(&e.body)) {
    if (transfers_.count(req->id)) return {};
    try {
      StripedTransfer st{*req, request_paths(topo_, *req, down_), 0};
      transfers_.emplace(req->id, std::move(st));
      grant_order_.push_back(req->id);
    } catch (const Error&) {
      // ungranted: the streams fall back to baseline routing
    }
  }
  return {};
}

std::vector<Directive> GridFtpController::on_packet_in(const PacketIn& pi, int epoch) {
  if (routes_.count(pi.flow)) return {};
  auto ends = endpoints(pi.header);
  if (!ends) return {};
  for (const auto& id : grant_order_) {
    auto& st = transfers_.at(id);
    if (st.request.src != ends->first || st.request.dst != ends->second) continue;
    if (st.streams_seen >= st.request.n_streams) continue;
    const Path p = assign_stream(st, st.streams_seen++);
    return route(pi.flow, pi.header, p, epoch);
  }
  return BaselineController::on_packet_in(pi, epoch);
}

SmocController::SmocController(const Topology& t, AddressBook book, std::string owner)
    : BaselineController(t, std::move(book), std::move(owner)) {}

std::vector<Directive> SmocController::on_packet_in(const PacketIn& pi, int epoch) {
  const auto& h = pi.header;
  if (h.ip_proto != kIpProtoTcp || !(h.has_option(kMpCapable) || h.has_option(kMpJoin))) {
    return BaselineController::on_packet_in(pi, epoch);
  }
  if (routes_.count(pi.flow)) return {};
  auto ends = endpoints(h);
  if (!ends) return {};
  try {
    if (h.has_option(kMpCapable)) {
      auto& entry = registry_.on_mp_capable(topo_, h, ends->first, ends->second, down_);
      return route(pi.flow, h, entry.instance.subflows.front().second, epoch);
    }
    return route(pi.flow, h, registry_.on_mp_join(h), epoch);
  } catch (const Error&) {
    return {};
  }
}

}  // namespace sdnlab
