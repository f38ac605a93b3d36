// Line formats for the controller event and directive logs. Every record is
// one line of space-separated `key=value` tokens after a kind word; values
// never contain spaces, doubles use shortest round-trip text.
#include <charconv>
#include <map>

#include "sdnlab/controller.hpp"
#include "sdnlab/error.hpp"

namespace sdnlab {
namespace {

struct Record {
  std::string kind;
  std::map<std::string, std::string, std::less<>> fields;

  const std::string& at(std::string_view k) const {
    auto it = fields.find(k);
    if (it == fields.end()) throw Error(ErrorKind::Parse, kind + ": missing '" + std::string(k) + "'");
    return it->second;
  }
};

Record tokenize(std::string_view line) {
  Record r;
  std::size_t pos = 0;
  bool first = true;
  while (pos < line.size()) {
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    auto tok = line.substr(pos, end - pos);
    pos = end + 1;
    if (tok.empty()) continue;
    if (first) {
      r.kind = std::string(tok);
      first = false;
      continue;
    }
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Parse, "malformed token '" + std::string(tok) + "'");
    r.fields.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
  }
  if (r.kind.empty()) throw Error(ErrorKind::Parse, "empty log record");
  return r;
}

long long to_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::Parse, "invalid integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> split_hops(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto pos = s.find(';', start);
    if (pos == std::string_view::npos) pos = s.size();
    if (pos > start) out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct EventFormatter {
  std::string operator()(const PacketIn& e) const {
    return "packet_in sw=" + e.switch_id + " port=" + std::to_string(e.port) + " flow=" + e.flow +
           " hdr=" + e.header.str();
  }
  std::string operator()(const LinkStats& e) const {
    return "link_stats link=" + e.link + " used=" + format_double(e.used_mbps) +
           " residual=" + format_double(e.residual_mbps) + " rtt=" + format_double(e.rtt_ms);
  }
  std::string operator()(const FlowStats& e) const {
    return "flow_stats flow=" + e.flow + " rate=" + format_double(e.rate_mbps);
  }
  std::string operator()(const FlowEnded& e) const { return "flow_ended flow=" + e.flow; }
  std::string operator()(const EpochTick& e) const { return "epoch_tick epoch=" + std::to_string(e.epoch); }
  std::string operator()(const PortStatus& e) const {
    return "port_status link=" + e.link + " up=" + (e.up ? "1" : "0");
  }
  std::string operator()(const AppDeclaration& e) const {
    return "app_declaration class=" + std::string(to_string(e.cls)) + " match=" + e.match.str();
  }
  std::string operator()(const TransferRequest& e) const {
    return "transfer_request id=" + e.id + " src=" + e.src + " dst=" + e.dst +
           " streams=" + std::to_string(e.n_streams) + " paths=" + std::to_string(e.requested_paths);
  }
};

}  // namespace

std::string to_line(const ControllerEvent& e) {
  return std::to_string(e.epoch) + " " + std::visit(EventFormatter{}, e.body);
}

ControllerEvent parse_event_line(std::string_view line) {
  auto sp = line.find(' ');
  if (sp == std::string_view::npos) throw Error(ErrorKind::Parse, "event line without body: '" + std::string(line) + "'");
  ControllerEvent ev;
  ev.epoch = static_cast<int>(to_int(line.substr(0, sp)));
  auto r = tokenize(line.substr(sp + 1));
  if (r.kind == "packet_in") {
    ev.body = PacketIn{r.at("sw"), static_cast<std::uint32_t>(to_int(r.at("port"))), HeaderTuple::parse(r.at("hdr")),
                       r.at("flow")};
  } else if (r.kind == "link_stats") {
    ev.body = LinkStats{r.at("link"), parse_double(r.at("used")), parse_double(r.at("residual")),
                        parse_double(r.at("rtt"))};
  } else if (r.kind == "flow_stats") {
    ev.body = FlowStats{r.at("flow"), parse_double(r.at("rate"))};
  } else if (r.kind == "flow_ended") {
    ev.body = FlowEnded{r.at("flow")};
  } else if (r.kind == "epoch_tick") {
    ev.body = EpochTick{static_cast<int>(to_int(r.at("epoch")))};
  } else if (r.kind == "port_status") {
    ev.body = PortStatus{r.at("link"), r.at("up") == "1"};
  } else if (r.kind == "app_declaration") {
    ev.body = AppDeclaration{MatchPattern::parse(r.at("match")), parse_flow_class(r.at("class"))};
  } else if (r.kind == "transfer_request") {
    ev.body = TransferRequest{r.at("id"), r.at("src"), r.at("dst"), static_cast<int>(to_int(r.at("streams"))),
                              static_cast<int>(to_int(r.at("paths")))};
  } else {
    throw Error(ErrorKind::Parse, "unknown event kind '" + r.kind + "'");
  }
  return ev;
}

std::string to_line(const Directive& d) {
  if (auto* i = std::get_if<InstallDirective>(&d)) return "install sw=" + i->switch_id + " entry=" + i->entry.dump();
  if (auto* r = std::get_if<RemoveDirective>(&d)) return "remove sw=" + r->switch_id + " cookie=" + r->cookie;
  const auto& rf = std::get<RouteFlowDirective>(d);
  return "route_flow flow=" + rf.flow + " src=" + rf.path.src + " dst=" + rf.path.dst + " hops=" + rf.path.str();
}

Directive parse_directive_line(std::string_view line) {
  auto r = tokenize(line);
  if (r.kind == "install") return InstallDirective{r.at("sw"), FlowEntry::parse(r.at("entry"))};
  if (r.kind == "remove") return RemoveDirective{r.at("sw"), r.at("cookie")};
  if (r.kind == "route_flow") return RouteFlowDirective{r.at("flow"), Path{r.at("src"), r.at("dst"), split_hops(r.at("hops"))}};
  throw Error(ErrorKind::Parse, "unknown directive kind '" + r.kind + "'");
}

}  // namespace sdnlab
