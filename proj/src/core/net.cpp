#include "sdnlab/net.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <vector>

#include "sdnlab/error.hpp"

namespace sdnlab {
namespace {

std::uint64_t parse_uint(std::string_view text, std::uint64_t max, std::string_view what, int base = 10) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || v > max) {
    throw Error(ErrorKind::Parse, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

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

}  // namespace

Ipv4 Ipv4::parse(std::string_view text) {
  auto parts = split(text, '.');
  if (parts.size() != 4) throw Error(ErrorKind::Parse, "invalid IPv4 address '" + std::string(text) + "'");
  std::uint32_t v = 0;
  for (auto p : parts) v = (v << 8) | static_cast<std::uint32_t>(parse_uint(p, 255, "IPv4 octet"));
  return Ipv4{v};
}

std::string Ipv4::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (value >> 24) & 0xffu, (value >> 16) & 0xffu,
                (value >> 8) & 0xffu, value & 0xffu);
  return buf;
}

Ipv4Prefix Ipv4Prefix::parse(std::string_view text) {
  auto slash = text.find('/');
  Ipv4Prefix p;
  p.base = Ipv4::parse(text.substr(0, slash));
  p.length = slash == std::string_view::npos ? 32 : static_cast<int>(parse_uint(text.substr(slash + 1), 32, "prefix length"));
  if ((p.base.value & ~p.mask()) != 0) {
    throw Error(ErrorKind::Parse, "prefix '" + std::string(text) + "' has host bits set");
  }
  return p;
}

std::string Ipv4Prefix::str() const { return base.str() + "/" + std::to_string(length); }

bool Ipv4Prefix::overlaps(const Ipv4Prefix& o) const {
  const Ipv4Prefix& wider = length <= o.length ? *this : o;
  const Ipv4Prefix& narrower = length <= o.length ? o : *this;
  return wider.contains(narrower.base);
}

std::string format_mac(std::uint64_t mac) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", unsigned((mac >> 40) & 0xff),
                unsigned((mac >> 32) & 0xff), unsigned((mac >> 24) & 0xff), unsigned((mac >> 16) & 0xff),
                unsigned((mac >> 8) & 0xff), unsigned(mac & 0xff));
  return buf;
}

std::uint64_t parse_mac(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 6) throw Error(ErrorKind::Parse, "invalid MAC '" + std::string(text) + "'");
  std::uint64_t v = 0;
  for (auto p : parts) v = (v << 8) | parse_uint(p, 255, "MAC octet", 16);
  return v;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error(ErrorKind::Io, "cannot format double");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::Parse, "invalid number '" + std::string(text) + "'");
  }
  return v;
}

std::string format_tcp_options(std::uint8_t opts) {
  if (opts == 0) return "-";
  std::string out;
  if (opts & kMpCapable) out += "mp_capable";
  if (opts & kMpJoin) out += out.empty() ? "mp_join" : "+mp_join";
  return out;
}

std::uint8_t parse_tcp_options(std::string_view text) {
  if (text == "-" || text.empty()) return 0;
  std::uint8_t v = 0;
  for (auto p : split(text, '+')) {
    if (p == "mp_capable") v |= kMpCapable;
    else if (p == "mp_join") v |= kMpJoin;
    else throw Error(ErrorKind::Parse, "unknown TCP option '" + std::string(p) + "'");
  }
  return v;
}

void HeaderTuple::validate() const {
  constexpr std::uint64_t kMac = (std::uint64_t{1} << 48) - 1;
  if (eth_src > kMac || eth_dst > kMac) throw Error(ErrorKind::Validation, "Ethernet address exceeds 48 bits");
  if (tcp_options != 0 && ip_proto != kIpProtoTcp) {
    throw Error(ErrorKind::Validation, "TCP options set on a non-TCP header");
  }
  if ((tcp_options & ~(kMpCapable | kMpJoin)) != 0) throw Error(ErrorKind::Validation, "unknown TCP option bits");
}

std::string HeaderTuple::str() const {
  return "in_port=" + std::to_string(in_port) + ",eth_src=" + format_mac(eth_src) + ",eth_dst=" + format_mac(eth_dst) +
         ",ip_src=" + ip_src.str() + ",ip_dst=" + ip_dst.str() + ",ip_proto=" + std::to_string(ip_proto) +
         ",tp_src=" + std::to_string(tp_src) + ",tp_dst=" + std::to_string(tp_dst) +
         ",tcp_options=" + format_tcp_options(tcp_options);
}

HeaderTuple HeaderTuple::parse(std::string_view text) {
  HeaderTuple h;
  for (auto kv : split(text, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Parse, "malformed header field '" + std::string(kv) + "'");
    auto key = kv.substr(0, eq);
    auto val = kv.substr(eq + 1);
    if (key == "in_port") h.in_port = static_cast<std::uint32_t>(parse_uint(val, 0xffffffffu, "in_port"));
    else if (key == "eth_src") h.eth_src = parse_mac(val);
    else if (key == "eth_dst") h.eth_dst = parse_mac(val);
    else if (key == "ip_src") h.ip_src = Ipv4::parse(val);
    else if (key == "ip_dst") h.ip_dst = Ipv4::parse(val);
    else if (key == "ip_proto") h.ip_proto = static_cast<std::uint8_t>(parse_uint(val, 255, "ip_proto"));
    else if (key == "tp_src") h.tp_src = static_cast<std::uint16_t>(parse_uint(val, 65535, "tp_src"));
    else if (key == "tp_dst") h.tp_dst = static_cast<std::uint16_t>(parse_uint(val, 65535, "tp_dst"));
    else if (key == "tcp_options") h.tcp_options = parse_tcp_options(val);
    else throw Error(ErrorKind::Parse, "unknown header field '" + std::string(key) + "'");
  }
  return h;
}

std::string FiveTuple::str() const {
  return ip_src.str() + ":" + std::to_string(tp_src) + "->" + ip_dst.str() + ":" + std::to_string(tp_dst) + "/" +
         std::to_string(ip_proto);
}

}  // namespace sdnlab
