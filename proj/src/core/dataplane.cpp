#include "sdnlab/dataplane.hpp"

#include <algorithm>
#include <charconv>

#include "sdnlab/error.hpp"

namespace sdnlab {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view s, std::uint64_t max) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || v > max) {
    throw Error(ErrorKind::Parse, "invalid integer '" + std::string(s) + "'");
  }
  return v;
}

std::string field_value_str(Field f, std::uint64_t v) {
  switch (f) {
    case Field::EthSrc:
    case Field::EthDst: return format_mac(v);
    case Field::IpSrc:
    case Field::IpDst: return Ipv4{static_cast<std::uint32_t>(v)}.str();
    case Field::TpSrc:
    case Field::TpDst: return std::to_string(v);
  }
  return {};
}

std::uint64_t parse_field_value(Field f, std::string_view s) {
  switch (f) {
    case Field::EthSrc:
    case Field::EthDst: return parse_mac(s);
    case Field::IpSrc:
    case Field::IpDst: return Ipv4::parse(s).value;
    case Field::TpSrc:
    case Field::TpDst: return parse_u64(s, 65535);
  }
  return 0;
}

bool valid_token(std::string_view s) {
  return std::none_of(s.begin(), s.end(), [](char c) { return c == '|' || c == ' ' || c == '\n' || c == '\t'; });
}

}  // namespace

std::string_view to_string(Field f) {
  switch (f) {
    case Field::EthSrc: return "eth_src";
    case Field::EthDst: return "eth_dst";
    case Field::IpSrc: return "ip_src";
    case Field::IpDst: return "ip_dst";
    case Field::TpSrc: return "tp_src";
    case Field::TpDst: return "tp_dst";
  }
  return "?";
}

Field parse_field(std::string_view name) {
  for (auto f : {Field::EthSrc, Field::EthDst, Field::IpSrc, Field::IpDst, Field::TpSrc, Field::TpDst}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorKind::Validation, "field '" + std::string(name) + "' is not rewritable");
}

MatchPattern MatchPattern::five_tuple(const HeaderTuple& h) {
  MatchPattern m;
  m.ip_src = h.ip_src;
  m.ip_dst = h.ip_dst;
  m.ip_proto = h.ip_proto;
  m.tp_src = h.tp_src;
  m.tp_dst = h.tp_dst;
  return m;
}

std::size_t MatchPattern::specified_fields() const {
  return std::size_t(in_port.has_value()) + eth_src.has_value() + eth_dst.has_value() + ip_src.has_value() +
         ip_dst.has_value() + ip_proto.has_value() + tp_src.has_value() + tp_dst.has_value() +
         tcp_options.has_value();
}

bool MatchPattern::empty() const { return !match_all && specified_fields() == 0; }

bool MatchPattern::matches(const HeaderTuple& h) const {
  return (!in_port || *in_port == h.in_port) && (!eth_src || *eth_src == h.eth_src) &&
         (!eth_dst || *eth_dst == h.eth_dst) && (!ip_src || *ip_src == h.ip_src) && (!ip_dst || *ip_dst == h.ip_dst) &&
         (!ip_proto || *ip_proto == h.ip_proto) && (!tp_src || *tp_src == h.tp_src) &&
         (!tp_dst || *tp_dst == h.tp_dst) && (!tcp_options || *tcp_options == h.tcp_options);
}

std::string MatchPattern::str() const {
  if (specified_fields() == 0) return "*";
  std::string out;
  auto add = [&](std::string_view k, const std::string& v) {
    if (!out.empty()) out += ',';
    out += k;
    out += '=';
    out += v;
  };
  if (in_port) add("in_port", std::to_string(*in_port));
  if (eth_src) add("eth_src", format_mac(*eth_src));
  if (eth_dst) add("eth_dst", format_mac(*eth_dst));
  if (ip_src) add("ip_src", ip_src->str());
  if (ip_dst) add("ip_dst", ip_dst->str());
  if (ip_proto) add("ip_proto", std::to_string(*ip_proto));
  if (tp_src) add("tp_src", std::to_string(*tp_src));
  if (tp_dst) add("tp_dst", std::to_string(*tp_dst));
  if (tcp_options) add("tcp_options", format_tcp_options(*tcp_options));
  return out;
}

MatchPattern MatchPattern::parse(std::string_view text) {
  MatchPattern m;
  if (text == "*") {
    m.match_all = true;
    return m;
  }
  for (auto kv : split(text, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Parse, "malformed match field '" + std::string(kv) + "'");
    auto k = kv.substr(0, eq);
    auto v = kv.substr(eq + 1);
    if (k == "in_port") m.in_port = static_cast<std::uint32_t>(parse_u64(v, 0xffffffffu));
    else if (k == "eth_src") m.eth_src = parse_mac(v);
    else if (k == "eth_dst") m.eth_dst = parse_mac(v);
    else if (k == "ip_src") m.ip_src = Ipv4::parse(v);
    else if (k == "ip_dst") m.ip_dst = Ipv4::parse(v);
    else if (k == "ip_proto") m.ip_proto = static_cast<std::uint8_t>(parse_u64(v, 255));
    else if (k == "tp_src") m.tp_src = static_cast<std::uint16_t>(parse_u64(v, 65535));
    else if (k == "tp_dst") m.tp_dst = static_cast<std::uint16_t>(parse_u64(v, 65535));
    else if (k == "tcp_options") m.tcp_options = parse_tcp_options(v);
    else throw Error(ErrorKind::Parse, "unknown match field '" + std::string(k) + "'");
  }
  return m;
}

void apply_set_field(HeaderTuple& h, const SetFieldAction& a) {
  switch (a.field) {
    case Field::EthSrc: h.eth_src = a.value; break;
    case Field::EthDst: h.eth_dst = a.value; break;
    case Field::IpSrc: h.ip_src = Ipv4{static_cast<std::uint32_t>(a.value)}; break;
    case Field::IpDst: h.ip_dst = Ipv4{static_cast<std::uint32_t>(a.value)}; break;
    case Field::TpSrc: h.tp_src = static_cast<std::uint16_t>(a.value); break;
    case Field::TpDst: h.tp_dst = static_cast<std::uint16_t>(a.value); break;
  }
}

SetFieldAction set_ip(Field f, Ipv4 v) { return SetFieldAction{f, v.value}; }

std::string format_actions(const std::vector<Action>& actions) {
  if (actions.empty()) return "-";
  std::string out;
  for (const auto& a : actions) {
    if (!out.empty()) out += ',';
    if (auto* o = std::get_if<OutputAction>(&a)) {
      out += "output:" + std::to_string(o->port);
    } else if (auto* s = std::get_if<SetFieldAction>(&a)) {
      out += "set_field:" + std::string(to_string(s->field)) + "=" + field_value_str(s->field, s->value);
    } else {
      out += "drop";
    }
  }
  return out;
}

std::vector<Action> parse_actions(std::string_view text) {
  std::vector<Action> out;
  if (text == "-") return out;
  for (auto a : split(text, ',')) {
    if (a == "drop") {
      out.emplace_back(DropAction{});
    } else if (a.rfind("output:", 0) == 0) {
      out.emplace_back(OutputAction{static_cast<std::uint32_t>(parse_u64(a.substr(7), 0xffffffffu))});
    } else if (a.rfind("set_field:", 0) == 0) {
      auto body = a.substr(10);
      auto eq = body.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorKind::Parse, "malformed set_field '" + std::string(a) + "'");
      auto f = parse_field(body.substr(0, eq));
      out.emplace_back(SetFieldAction{f, parse_field_value(f, body.substr(eq + 1))});
    } else {
      throw Error(ErrorKind::Parse, "unknown action '" + std::string(a) + "'");
    }
  }
  return out;
}

void FlowEntry::validate() const {
  if (match.empty()) throw Error(ErrorKind::Validation, "flow entry '" + cookie + "' has an empty match");
  std::size_t outputs = 0, drops = 0;
  for (const auto& a : actions) {
    if (std::holds_alternative<OutputAction>(a)) ++outputs;
    if (std::holds_alternative<DropAction>(a)) ++drops;
    if (auto* s = std::get_if<SetFieldAction>(&a)) {
      if ((s->field == Field::EthSrc || s->field == Field::EthDst) && s->value >= (std::uint64_t{1} << 48)) {
        throw Error(ErrorKind::Validation, "set_field value exceeds 48 bits");
      }
      if ((s->field == Field::TpSrc || s->field == Field::TpDst) && s->value > 65535) {
        throw Error(ErrorKind::Validation, "set_field value exceeds 16 bits");
      }
      if ((s->field == Field::IpSrc || s->field == Field::IpDst) && s->value > 0xffffffffu) {
        throw Error(ErrorKind::Validation, "set_field value exceeds 32 bits");
      }
    }
  }
  if (outputs > 1) throw Error(ErrorKind::Validation, "flow entry '" + cookie + "' has more than one output");
  if (drops > 0 && actions.size() > 1) {
    throw Error(ErrorKind::Validation, "flow entry '" + cookie + "' combines drop with other actions");
  }
  if (cookie.empty() || !valid_token(cookie)) throw Error(ErrorKind::Validation, "invalid cookie '" + cookie + "'");
  if (owner.empty() || !valid_token(owner)) throw Error(ErrorKind::Validation, "invalid owner '" + owner + "'");
}

std::optional<std::uint32_t> FlowEntry::output_port() const {
  for (const auto& a : actions) {
    if (auto* o = std::get_if<OutputAction>(&a)) return o->port;
  }
  return std::nullopt;
}

std::string FlowEntry::dump() const {
  return std::to_string(priority) + "|" + owner + "|" + match.str() + "|" + format_actions(actions) + "|" + cookie;
}

FlowEntry FlowEntry::parse(std::string_view line) {
  auto parts = split(line, '|');
  if (parts.size() != 5) throw Error(ErrorKind::Parse, "flow entry needs 5 fields: '" + std::string(line) + "'");
  FlowEntry e;
  int prio = 0;
  auto [p, ec] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), prio);
  if (ec != std::errc{} || p != parts[0].data() + parts[0].size()) {
    throw Error(ErrorKind::Parse, "invalid priority '" + std::string(parts[0]) + "'");
  }
  e.priority = prio;
  e.owner = std::string(parts[1]);
  e.match = MatchPattern::parse(parts[2]);
  e.actions = parse_actions(parts[3]);
  e.cookie = std::string(parts[4]);
  return e;
}

std::uint64_t FlowTable::install(FlowEntry e) {
  const auto seq = next_seq_++;
  auto pos = std::find_if(entries_.begin(), entries_.end(), [&](const Slot& s) { return s.entry.priority < e.priority; });
  entries_.insert(pos, Slot{std::move(e), seq});
  return seq;
}

std::size_t FlowTable::remove_cookie(std::string_view cookie) {
  auto before = entries_.size();
  std::erase_if(entries_, [&](const Slot& s) { return s.entry.cookie == cookie; });
  return before - entries_.size();
}

const FlowEntry* FlowTable::classify(const HeaderTuple& h) const {
  for (const auto& s : entries_) {
    if (s.entry.match.matches(h)) return &s.entry;
  }
  return nullptr;
}

std::vector<const FlowEntry*> FlowTable::entries() const {
  std::vector<const FlowEntry*> out;
  for (const auto& s : entries_) out.push_back(&s.entry);
  return out;
}

SwitchTables::SwitchTables(const Topology& t) {
  for (const auto& n : t.nodes()) {
    if (n.kind == NodeKind::Switch) tables_.emplace(n.id, FlowTable{});
  }
}

FlowTable& SwitchTables::mutable_table(std::string_view sw) {
  auto it = tables_.find(sw);
  if (it == tables_.end()) throw Error(ErrorKind::UnknownEntity, "unknown switch '" + std::string(sw) + "'");
  return it->second;
}

const FlowTable& SwitchTables::table(std::string_view sw) const {
  auto it = tables_.find(sw);
  if (it == tables_.end()) throw Error(ErrorKind::UnknownEntity, "unknown switch '" + std::string(sw) + "'");
  return it->second;
}

EntryHandle SwitchTables::install_entry(std::string_view sw, FlowEntry e) {
  auto& table = mutable_table(sw);
  e.validate();
  return EntryHandle{std::string(sw), table.install(std::move(e))};
}

std::size_t SwitchTables::remove(std::string_view sw, std::string_view cookie) {
  return mutable_table(sw).remove_cookie(cookie);
}

const FlowEntry* SwitchTables::classify(std::string_view sw, const HeaderTuple& h) const { return table(sw).classify(h); }

std::vector<std::pair<std::string, FlowEntry>> SwitchTables::by_owner(std::string_view owner) const {
  std::vector<std::pair<std::string, FlowEntry>> out;
  for (const auto& [sw, table] : tables_) {
    for (const auto* e : table.entries()) {
      if (e->owner == owner) out.emplace_back(sw, *e);
    }
  }
  return out;
}

std::string SwitchTables::dump() const {
  std::string out;
  for (const auto& [sw, table] : tables_) {
    out += "# " + sw + "\n";
    for (const auto* e : table.entries()) out += e->dump() + "\n";
  }
  return out;
}

std::vector<std::string> ForwardTrace::links() const {
  std::vector<std::string> out;
  for (const auto& h : hops) {
    if (!h.out_link.empty()) out.push_back(h.out_link);
  }
  return out;
}

ForwardTrace forward(const Topology& t, const SwitchTables& tables, std::string_view ingress_switch,
                     std::uint32_t ingress_port, HeaderTuple h, const ForwardOptions& opts) {
  ForwardTrace trace;
  std::string sw(ingress_switch);
  h.in_port = ingress_port;
  while (true) {
    if (trace.hops.size() >= opts.hop_limit) {
      trace.terminal = TraceTerminal::Dropped;
      trace.loop = true;
      trace.where = sw;
      break;
    }
    const FlowEntry* e = tables.classify(sw, h);
    if (e == nullptr) {
      trace.terminal = TraceTerminal::PacketIn;
      trace.where = sw;
      break;
    }
    std::optional<std::uint32_t> out_port;
    HeaderTuple out = h;
    for (const auto& a : e->actions) {
      if (auto* s = std::get_if<SetFieldAction>(&a)) {
        apply_set_field(out, *s);
      } else if (auto* o = std::get_if<OutputAction>(&a)) {
        out_port = o->port;
        break;
      } else {
        break;
      }
    }
    TraceHop hop{sw, e->cookie, out, {}};
    if (!out_port) {
      trace.hops.push_back(std::move(hop));
      trace.terminal = TraceTerminal::Dropped;
      trace.where = sw;
      h = out;
      break;
    }
    const Link* link = t.link_at_port(sw, *out_port);
    if (link == nullptr) {
      throw Error(ErrorKind::Directive,
                  "entry '" + e->cookie + "' on '" + sw + "' outputs to nonexistent port " + std::to_string(*out_port));
    }
    hop.out_link = link->id;
    trace.hops.push_back(std::move(hop));
    h = out;
    if (opts.down_links != nullptr && opts.down_links->count(link->id)) {
      trace.terminal = TraceTerminal::Dropped;
      trace.where = sw;
      break;
    }
    const auto& next = link->other(sw);
    if (t.node(next).kind == NodeKind::Host) {
      trace.terminal = TraceTerminal::Delivered;
      trace.where = next;
      break;
    }
    h.in_port = t.port_of(next, link->id);
    sw = next;
  }
  trace.final_header = h;
  return trace;
}

}  // namespace sdnlab
