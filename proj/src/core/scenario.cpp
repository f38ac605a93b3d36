#include "sdnlab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "sdnlab/error.hpp"
#include "sdnlab/multipath.hpp"
#include "sdnlab/overseer.hpp"

namespace sdnlab {

using detail::check_keys;
using detail::get_array;
using detail::get_int;
using detail::get_number;
using detail::get_string;
using nlohmann::json;

std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::Validation, "draw from an empty range");
  // Rejection sampling keeps the draw unbiased and portable.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % n;
  }
}

namespace {

Ipv4Prefix parse_prefix(const json& j, const std::string& where) {
  if (!j.is_string()) throw Error(ErrorKind::Validation, where + ": expected a prefix string");
  try {
    auto p = Ipv4Prefix::parse(j.get<std::string>());
    if ((p.base.value & ~p.mask()) != 0) throw Error(ErrorKind::Validation, "host bits set");
    return p;
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, where + ": " + e.what());
  }
}

template <class F>
decltype(auto) wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Validation || e.kind() == ErrorKind::UnknownEntity) {
      throw Error(ErrorKind::Validation, where + ": " + e.what());
    }
    throw;
  }
}

std::optional<double> opt_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return get_number(j, key, where);
}

/// Expands the event list into simulator events.
class Expander {
 public:
  Expander(const Scenario& s) : s_(s), topo_(*s.topo) {}

  std::vector<SimEvent> expand(const json& declarations, const json& events) {
    for (std::size_t i = 0; i < declarations.size(); ++i) {
      const auto where = "declarations[" + std::to_string(i) + "]";
      check_keys(declarations[i], where, {"match", "class"});
      push(0, notify(declaration(declarations[i], where)));
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto where = "events[" + std::to_string(i) + "]";
      event(events[i], where, i);
    }
    std::stable_sort(out_.begin(), out_.end(), [](const auto& a, const auto& b) { return a.at_epoch < b.at_epoch; });
    check_stops();
    return std::move(out_);
  }

 private:
  static SimEvent notify(ControllerEventBody body) {
    SimEvent e;
    e.kind = SimEventKind::Notify;
    e.notice = std::move(body);
    return e;
  }

  void push(int at, SimEvent e) {
    e.at_epoch = at;
    out_.push_back(std::move(e));
  }

  AppDeclaration declaration(const json& j, const std::string& where) {
    return wrap(where, [&] {
      AppDeclaration d;
      d.match = MatchPattern::parse(get_string(j, "match", where));
      if (d.match.empty()) throw Error(ErrorKind::Validation, "declaration match is empty");
      d.cls = parse_flow_class(get_string(j, "class", where));
      return d;
    });
  }

  const Node& host(const std::string& id, const std::string& where) {
    const auto& n = wrap(where, [&]() -> const Node& { return topo_.node(id); });
    if (n.kind != NodeKind::Host) throw Error(ErrorKind::Validation, where + ": '" + id + "' is not a host");
    return n;
  }

  /// Address a host uses on the wire: its slice's virtual address if it is
  /// a slice member, else its own.
  std::pair<Ipv4, std::string> address(const Node& n) const {
    for (const auto& s : s_.slices) {
      if (const auto* m = s.member(n.id)) return {m->virtual_ip, s.id};
    }
    return {n.ip, ""};
  }

  TrafficFlow make_flow(const std::string& id, const Node& src, const Node& dst, std::uint8_t proto,
                        std::optional<std::uint16_t> tp_src, std::uint16_t tp_dst, std::optional<double> cap,
                        std::uint8_t tcp_options, const std::string& where) {
    if (id.empty()) throw Error(ErrorKind::Validation, where + ": flow id is empty");
    if (!flow_epoch_.emplace(id, -1).second) throw Error(ErrorKind::Validation, where + ": duplicate flow id '" + id + "'");
    if (src.id == dst.id) throw Error(ErrorKind::Validation, where + ": flow '" + id + "' has src == dst");
    const auto [sip, sspace] = address(src);
    const auto [dip, dspace] = address(dst);
    if (sspace != dspace) {
      throw Error(ErrorKind::Validation, where + ": flow '" + id + "' crosses slices ('" + sspace + "' -> '" + dspace + "')");
    }
    if (cap && !(*cap > 0)) throw Error(ErrorKind::Validation, where + ": per_stream_cap_mbps must be > 0");
    TrafficFlow f;
    f.id = id;
    f.src = src.id;
    f.dst = dst.id;
    f.header.eth_src = src.mac;
    f.header.eth_dst = dst.mac;
    f.header.ip_src = sip;
    f.header.ip_dst = dip;
    f.header.ip_proto = proto;
    // Per-slice numbering lets tenants produce identical virtual headers.
    f.header.tp_src = tp_src.value_or(static_cast<std::uint16_t>(32768 + (ordinal_[sspace]++ % 16384)));
    f.header.tp_dst = tp_dst;
    f.header.tcp_options = tcp_options;
    f.per_stream_cap_mbps = cap;
    if (!tuples_.insert(sspace + "|" + FiveTuple::of(f.header).str()).second) {
      throw Error(ErrorKind::Validation, where + ": flow '" + id + "' reuses the five-tuple " +
                                             FiveTuple::of(f.header).str());
    }
    return f;
  }

  void start(int at, TrafficFlow f) {
    flow_epoch_[f.id] = at;
    SimEvent e;
    e.kind = SimEventKind::FlowStart;
    e.subject = f.id;
    e.flow = std::move(f);
    push(at, std::move(e));
  }

  void stop(int at, const std::string& id) {
    SimEvent e;
    e.kind = SimEventKind::FlowStop;
    e.subject = id;
    push(at, std::move(e));
    stops_.emplace_back(at, id);
  }

  static std::uint16_t port(const json& j, const char* key, const std::string& where, std::uint16_t dflt) {
    if (!j.contains(key)) return dflt;
    auto v = get_int(j, key, where);
    if (v < 0 || v > 65535) throw Error(ErrorKind::Validation, where + "." + key + ": port out of range");
    return static_cast<std::uint16_t>(v);
  }

  static std::uint8_t proto(const json& j, const std::string& where) {
    if (!j.contains("proto")) return kIpProtoTcp;
    const auto& v = j.at("proto");
    if (v == "tcp") return kIpProtoTcp;
    if (v == "udp") return kIpProtoUdp;
    if (v.is_number_integer() && v.get<long long>() >= 0 && v.get<long long>() <= 255) {
      return static_cast<std::uint8_t>(v.get<long long>());
    }
    throw Error(ErrorKind::Validation, where + ".proto: expected \"tcp\", \"udp\" or 0-255");
  }

  int epoch_of(const json& j, const std::string& where) {
    auto at = get_int(j, "at", where);
    if (at < 0 || at >= s_.epochs) {
      throw Error(ErrorKind::Validation, where + ".at: epoch " + std::to_string(at) + " outside [0, " +
                                             std::to_string(s_.epochs) + ")");
    }
    return static_cast<int>(at);
  }

  void duration(int at, const json& j, const std::string& where, const std::vector<std::string>& ids) {
    if (!j.contains("duration")) return;
    auto d = get_int(j, "duration", where);
    if (d < 1) throw Error(ErrorKind::Validation, where + ".duration must be >= 1");
    if (at + d >= s_.epochs) return;
    for (const auto& id : ids) stop(static_cast<int>(at + d), id);
  }

  void event(const json& j, const std::string& where, std::size_t index) {
    detail::require_object(j, where);
    const auto kind = get_string(j, "kind", where);
    if (kind == "flow_start") {
      check_keys(j, where, {"kind", "at", "flow"});
      const int at = epoch_of(j, where);
      const auto& f = j.at("flow");
      const auto fw = where + ".flow";
      check_keys(f, fw, {"id", "src", "dst", "tp_dst"},
                 {"tp_src", "proto", "per_stream_cap_mbps", "class", "tcp_options", "duration"});
      auto flow = make_flow(get_string(f, "id", fw), host(get_string(f, "src", fw), fw), host(get_string(f, "dst", fw), fw),
                            proto(f, fw),
                            f.contains("tp_src") ? std::optional<std::uint16_t>(port(f, "tp_src", fw, 0)) : std::nullopt,
                            port(f, "tp_dst", fw, 0), opt_number(f, "per_stream_cap_mbps", fw),
                            f.contains("tcp_options")
                                ? wrap(fw, [&] { return parse_tcp_options(get_string(f, "tcp_options", fw)); })
                                : std::uint8_t{0},
                            fw);
      if (f.contains("class")) flow.class_hint = wrap(fw, [&] { return parse_flow_class(get_string(f, "class", fw)); });
      const auto id = flow.id;
      start(at, std::move(flow));
      duration(at, f, fw, {id});
    } else if (kind == "flow_stop") {
      check_keys(j, where, {"kind", "at", "flow"});
      stop(epoch_of(j, where), get_string(j, "flow", where));
    } else if (kind == "link_fail" || kind == "link_restore") {
      check_keys(j, where, {"kind", "at", "link"});
      SimEvent e;
      e.kind = kind == "link_fail" ? SimEventKind::LinkFail : SimEventKind::LinkRestore;
      e.subject = get_string(j, "link", where);
      if (!topo_.has_link(e.subject)) throw Error(ErrorKind::Validation, where + ": unknown link '" + e.subject + "'");
      push(epoch_of(j, where), std::move(e));
    } else if (kind == "declare") {
      check_keys(j, where, {"kind", "at", "match", "class"});
      push(epoch_of(j, where), notify(declaration(j, where)));
    } else if (kind == "transfer") {
      check_keys(j, where, {"kind", "at", "id", "src", "dst", "n_streams", "paths"},
                 {"per_stream_cap_mbps", "tp_dst", "duration"});
      transfer(j, where);
    } else if (kind == "mptcp") {
      check_keys(j, where, {"kind", "at", "id", "src", "dst", "subflows"},
                 {"per_stream_cap_mbps", "tp_dst", "duration"});
      mptcp(j, where);
    } else if (kind == "random_traffic") {
      check_keys(j, where, {"kind", "at", "until", "per_epoch"},
                 {"id", "max_duration", "per_stream_cap_mbps", "tp_dst"});
      random_traffic(j, where, index);
    } else {
      throw Error(ErrorKind::Validation, where + ".kind: unknown event kind '" + kind + "'");
    }
  }

  void transfer(const json& j, const std::string& where) {
    const int at = epoch_of(j, where);
    const auto id = get_string(j, "id", where);
    const auto& src = host(get_string(j, "src", where), where);
    const auto& dst = host(get_string(j, "dst", where), where);
    const auto streams = get_int(j, "n_streams", where);
    const auto paths = get_int(j, "paths", where);
    if (streams < 1 || paths < 1) throw Error(ErrorKind::Validation, where + ": n_streams and paths must be >= 1");
    push(at, notify(TransferRequest{id, src.id, dst.id, static_cast<int>(streams), static_cast<int>(paths)}));
    const auto tp = port(j, "tp_dst", where, 50000);
    std::vector<std::string> ids;
    for (long long i = 0; i < streams; ++i) {
      auto f = make_flow(id + "/s" + std::to_string(i), src, dst, kIpProtoTcp, std::nullopt, tp,
                         opt_number(j, "per_stream_cap_mbps", where), 0, where);
      ids.push_back(f.id);
      start(at, std::move(f));
    }
    duration(at, j, where, ids);
  }

  void mptcp(const json& j, const std::string& where) {
    const int at = epoch_of(j, where);
    const auto id = get_string(j, "id", where);
    const auto& src = host(get_string(j, "src", where), where);
    const auto& dst = host(get_string(j, "dst", where), where);
    const auto n = get_int(j, "subflows", where);
    if (n < 1) throw Error(ErrorKind::Validation, where + ": subflows must be >= 1");
    const auto tp = port(j, "tp_dst", where, 5001);
    std::vector<std::string> ids;
    for (long long i = 0; i < n; ++i) {
      auto f = make_flow(id + "/sf" + std::to_string(i), src, dst, kIpProtoTcp, std::nullopt, tp,
                         opt_number(j, "per_stream_cap_mbps", where), i == 0 ? kMpCapable : kMpJoin, where);
      ids.push_back(f.id);
      start(at, std::move(f));
    }
    duration(at, j, where, ids);
  }

  void random_traffic(const json& j, const std::string& where, std::size_t index) {
    const int from = epoch_of(j, where);
    const auto until = std::min<long long>(get_int(j, "until", where), s_.epochs);
    const auto per_epoch = get_int(j, "per_epoch", where);
    const auto max_dur = j.contains("max_duration") ? get_int(j, "max_duration", where) : 5;
    if (per_epoch < 0 || max_dur < 1 || until < from) {
      throw Error(ErrorKind::Validation, where + ": need until >= at, per_epoch >= 0, max_duration >= 1");
    }
    const auto prefix = j.contains("id") ? get_string(j, "id", where) : std::string("rnd");
    std::vector<std::uint16_t> ports{22, 80, 5001};
    if (j.contains("tp_dst")) {
      ports.clear();
      for (const auto& p : get_array(j, "tp_dst", where)) {
        if (!p.is_number_integer() || p.get<long long>() < 0 || p.get<long long>() > 65535) {
          throw Error(ErrorKind::Validation, where + ".tp_dst: expected ports");
        }
        ports.push_back(static_cast<std::uint16_t>(p.get<long long>()));
      }
      if (ports.empty()) throw Error(ErrorKind::Validation, where + ".tp_dst is empty");
    }
    // Candidate pairs stay inside one slice (or span all hosts without slices).
    std::vector<std::pair<const Node*, const Node*>> pairs;
    auto add_pairs = [&](const std::vector<const Node*>& group) {
      for (const auto* a : group) {
        for (const auto* b : group) {
          if (a != b) pairs.emplace_back(a, b);
        }
      }
    };
    if (s_.slices.empty()) {
      std::vector<const Node*> hosts;
      for (const auto& n : topo_.nodes()) {
        if (n.kind == NodeKind::Host) hosts.push_back(&n);
      }
      add_pairs(hosts);
    } else {
      for (const auto& s : s_.slices) {
        std::vector<const Node*> group;
        for (const auto& m : s.members) group.push_back(&topo_.node(m.host));
        add_pairs(group);
      }
    }
    if (pairs.empty()) throw Error(ErrorKind::Validation, where + ": no host pairs to draw from");
    std::mt19937_64 rng(s_.seed * 0x9E3779B97F4A7C15ULL + index);
    const auto cap = opt_number(j, "per_stream_cap_mbps", where);
    for (int e = from; e < until; ++e) {
      for (long long i = 0; i < per_epoch; ++i) {
        const auto& [a, b] = pairs[draw_below(rng, pairs.size())];
        const auto dur = 1 + static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(max_dur)));
        const auto tp = ports[draw_below(rng, ports.size())];
        auto f = make_flow(prefix + "/" + std::to_string(e) + "." + std::to_string(i), *a, *b, kIpProtoTcp, std::nullopt,
                           tp, cap, 0, where);
        const auto id = f.id;
        start(e, std::move(f));
        if (e + dur < s_.epochs) stop(e + dur, id);
      }
    }
  }

  void check_stops() {
    std::set<std::string> stopped;
    for (const auto& [at, id] : stops_) {
      auto it = flow_epoch_.find(id);
      if (it == flow_epoch_.end() || it->second < 0) throw Error(ErrorKind::Validation, "flow_stop for unknown flow '" + id + "'");
      if (at <= it->second) {
        throw Error(ErrorKind::Validation, "flow '" + id + "' stops at epoch " + std::to_string(at) +
                                               " but starts at " + std::to_string(it->second));
      }
      if (!stopped.insert(id).second) throw Error(ErrorKind::Validation, "flow '" + id + "' stopped twice");
    }
  }

  const Scenario& s_;
  const Topology& topo_;
  std::vector<SimEvent> out_;
  std::map<std::string, int> flow_epoch_;
  std::set<std::string> tuples_;
  std::vector<std::pair<int, std::string>> stops_;
  std::map<std::string, std::uint32_t> ordinal_;
};

Slice parse_slice(const json& j, const std::string& where) {
  check_keys(j, where, {"id", "virtual_prefixes"}, {"controller", "members"});
  Slice s;
  s.id = get_string(j, "id", where);
  const auto& space = get_array(j, "virtual_prefixes", where);
  for (std::size_t i = 0; i < space.size(); ++i) {
    s.virtual_space.push_back(parse_prefix(space[i], where + ".virtual_prefixes[" + std::to_string(i) + "]"));
  }
  if (j.contains("controller")) s.controller = get_string(j, "controller", where);
  const auto& names = controller_names();
  if (std::find(names.begin(), names.end(), s.controller) == names.end()) {
    throw Error(ErrorKind::Validation, where + ".controller: unknown controller '" + s.controller + "'");
  }
  if (j.contains("members")) {
    const auto& members = get_array(j, "members", where);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto mw = where + ".members[" + std::to_string(i) + "]";
      check_keys(members[i], mw, {"host", "virtual_ip"});
      SliceMember m;
      m.host = get_string(members[i], "host", mw);
      m.virtual_ip = wrap(mw, [&] { return Ipv4::parse(get_string(members[i], "virtual_ip", mw)); });
      s.members.push_back(std::move(m));
    }
  }
  return s;
}

}  // namespace

Scenario load_scenario(const json& doc) {
  const std::string where = "scenario";
  check_keys(doc, where, {"name", "nodes", "links"},
             {"description", "slices", "slice_bases", "disabled_proxies", "controller", "epochs", "seed",
              "declarations", "events", "expect"});
  Scenario s;
  s.document = doc;
  s.name = get_string(doc, "name", where);
  if (doc.contains("description")) s.description = get_string(doc, "description", where);
  s.topo = std::make_shared<const Topology>(wrap(where, [&] { return Topology::from_json(doc.at("nodes"), doc.at("links")); }));
  if (doc.contains("controller")) s.controller = get_string(doc, "controller", where);
  const auto& names = controller_names();
  if (std::find(names.begin(), names.end(), s.controller) == names.end()) {
    throw Error(ErrorKind::Validation, where + ".controller: unknown controller '" + s.controller + "'");
  }
  if (doc.contains("epochs")) {
    auto e = get_int(doc, "epochs", where);
    if (e < 1 || e > 1000000) throw Error(ErrorKind::Validation, where + ".epochs must be in [1, 1000000]");
    s.epochs = static_cast<int>(e);
  }
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned()) throw Error(ErrorKind::Validation, where + ".seed: expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("slices")) {
    const auto& arr = get_array(doc, "slices", where);
    for (std::size_t i = 0; i < arr.size(); ++i) s.slices.push_back(parse_slice(arr[i], "slices[" + std::to_string(i) + "]"));
  }
  if (doc.contains("slice_bases")) {
    const auto& b = doc.at("slice_bases");
    detail::require_object(b, "slice_bases");
    for (auto it = b.begin(); it != b.end(); ++it) s.slice_bases[it.key()] = parse_prefix(it.value(), "slice_bases." + it.key());
  }
  if (doc.contains("disabled_proxies")) {
    for (const auto& d : get_array(doc, "disabled_proxies", where)) {
      if (!d.is_string()) throw Error(ErrorKind::Validation, "disabled_proxies: expected domain names");
      s.disabled_proxies.push_back(d.get<std::string>());
    }
    if (s.slices.empty() && !s.disabled_proxies.empty()) {
      throw Error(ErrorKind::Validation, "disabled_proxies needs slices");
    }
  }
  // Dry-run the slice registration so configuration errors surface here.
  if (!s.slices.empty()) {
    wrap("slices", [&] {
      Federation fed(*s.topo, s.slice_bases);
      for (const auto& sl : s.slices) fed.register_slice(sl);
      for (const auto& d : s.disabled_proxies) fed.proxy(d);
      return 0;
    });
  }
  static const json empty = json::array();
  const json& decls = doc.contains("declarations") ? get_array(doc, "declarations", where) : empty;
  const json& events = doc.contains("events") ? get_array(doc, "events", where) : empty;
  s.events = Expander(s).expand(decls, events);

  if (doc.contains("expect")) {
    const auto& arr = get_array(doc, "expect", where);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto ew = "expect[" + std::to_string(i) + "]";
      check_keys(arr[i], ew, {"rate_mbps"}, {"flow", "flows", "epoch", "rel_tol", "abs_tol"});
      Expectation x;
      if (arr[i].contains("flow") == arr[i].contains("flows")) {
        throw Error(ErrorKind::Validation, ew + ": give exactly one of 'flow' or 'flows'");
      }
      if (arr[i].contains("flow")) {
        x.flows.push_back(get_string(arr[i], "flow", ew));
      } else {
        for (const auto& f : get_array(arr[i], "flows", ew)) {
          if (!f.is_string()) throw Error(ErrorKind::Validation, ew + ".flows: expected flow ids");
          x.flows.push_back(f.get<std::string>());
        }
        if (x.flows.empty()) throw Error(ErrorKind::Validation, ew + ".flows is empty");
      }
      if (arr[i].contains("epoch")) {
        auto e = get_int(arr[i], "epoch", ew);
        if (e < 0 || e >= s.epochs) throw Error(ErrorKind::Validation, ew + ".epoch outside the run");
        x.epoch = static_cast<int>(e);
      }
      x.rate_mbps = get_number(arr[i], "rate_mbps", ew);
      if (auto v = opt_number(arr[i], "rel_tol", ew)) x.rel_tol = *v;
      if (auto v = opt_number(arr[i], "abs_tol", ew)) x.abs_tol = *v;
      if (x.rel_tol < 0 || x.abs_tol < 0) throw Error(ErrorKind::Validation, ew + ": tolerances must be >= 0");
      s.expectations.push_back(std::move(x));
    }
  }
  return s;
}

Scenario load_scenario(std::string_view text, std::string_view where, const std::filesystem::path& base_dir) {
  auto doc = detail::parse_json(text, where);
  detail::require_object(doc, where);
  if (doc.contains("topology")) {
    if (doc.contains("nodes") || doc.contains("links")) {
      throw Error(ErrorKind::Validation, std::string(where) + ": give either 'topology' or 'nodes'/'links'");
    }
    const auto& ref = doc.at("topology");
    if (!ref.is_string()) throw Error(ErrorKind::Validation, std::string(where) + ".topology: expected a file name");
    const auto path = base_dir / ref.get<std::string>();
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read topology file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto topo = detail::parse_json(ss.str(), path.string());
    check_keys(topo, path.string(), {"nodes", "links"}, {"name", "description"});
    doc["nodes"] = topo.at("nodes");
    doc["links"] = topo.at("links");
    doc.erase("topology");
  }
  return load_scenario(doc);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str(), path.string(), path.parent_path());
}

const std::vector<std::string>& controller_names() {
  static const std::vector<std::string> names{"baseline", "overseer", "gridftp", "smoc"};
  return names;
}

std::unique_ptr<Controller> make_controller(std::string_view name, const Topology& t, AddressBook book,
                                            std::string owner) {
  if (name == "baseline") return std::make_unique<BaselineController>(t, std::move(book), std::move(owner));
  if (name == "overseer") return std::make_unique<OverseerController>(t, std::move(book), OverseerConfig{}, std::move(owner));
  if (name == "gridftp") return std::make_unique<GridFtpController>(t, std::move(book), std::move(owner));
  if (name == "smoc") return std::make_unique<SmocController>(t, std::move(book), std::move(owner));
  throw Error(ErrorKind::Validation, "unknown controller '" + std::string(name) + "'");
}

std::unique_ptr<Controller> make_root_controller(const Scenario& s) {
  if (s.slices.empty()) return make_controller(s.controller, *s.topo, AddressBook::from_topology(*s.topo));
  const Topology& t = *s.topo;
  auto hv = std::make_unique<SliceHypervisor>(
      t, s.slices, [&t](const Slice& sl, AddressBook book) { return make_controller(sl.controller, t, std::move(book), sl.id); },
      s.slice_bases);
  for (const auto& d : s.disabled_proxies) hv->set_proxy_enabled(d, false);
  return hv;
}

void add_declaration(json& doc, std::string_view match, std::string_view cls) {
  auto m = MatchPattern::parse(match);
  if (m.empty()) throw Error(ErrorKind::Validation, "declaration match is empty");
  parse_flow_class(cls);
  if (!doc.contains("declarations")) doc["declarations"] = json::array();
  doc["declarations"].push_back(json{{"match", m.str()}, {"class", std::string(cls)}});
}

}  // namespace sdnlab
