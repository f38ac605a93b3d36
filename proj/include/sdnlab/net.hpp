#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sdnlab {

/// IPv4 address in host byte order.
struct Ipv4 {
  std::uint32_t value = 0;

  static Ipv4 parse(std::string_view text);
  std::string str() const;

  auto operator<=>(const Ipv4&) const = default;
};

struct Ipv4Prefix {
  Ipv4 base;
  int length = 32;

  static Ipv4Prefix parse(std::string_view text);
  std::string str() const;

  std::uint64_t size() const { return std::uint64_t{1} << (32 - length); }
  std::uint32_t mask() const { return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length); }
  bool contains(Ipv4 a) const { return (a.value & mask()) == base.value; }
  bool overlaps(const Ipv4Prefix& o) const;

  auto operator<=>(const Ipv4Prefix&) const = default;
};

std::string format_mac(std::uint64_t mac);
std::uint64_t parse_mac(std::string_view text);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

inline constexpr std::uint8_t kIpProtoTcp = 6;
inline constexpr std::uint8_t kIpProtoUdp = 17;

enum TcpOption : std::uint8_t {
  kMpCapable = 1u << 0,
  kMpJoin = 1u << 1,
};

std::string format_tcp_options(std::uint8_t opts);
std::uint8_t parse_tcp_options(std::string_view text);

/// Packet header abstraction matched by flow entries.
struct HeaderTuple {
  std::uint32_t in_port = 0;
  std::uint64_t eth_src = 0;
  std::uint64_t eth_dst = 0;
  Ipv4 ip_src;
  Ipv4 ip_dst;
  std::uint8_t ip_proto = kIpProtoTcp;
  std::uint16_t tp_src = 0;
  std::uint16_t tp_dst = 0;
  std::uint8_t tcp_options = 0;

  bool has_option(TcpOption o) const { return (tcp_options & o) != 0; }

  /// Throws Error(Validation) on a 48-bit overflow or options on a non-TCP header.
  void validate() const;

  /// Stable `key=value` rendering used by logs and traces.
  std::string str() const;
  static HeaderTuple parse(std::string_view text);

  bool operator==(const HeaderTuple&) const = default;
};

/// The MPTCP / flow identity of a header (addresses, protocol, ports).
struct FiveTuple {
  Ipv4 ip_src;
  Ipv4 ip_dst;
  std::uint8_t ip_proto = 0;
  std::uint16_t tp_src = 0;
  std::uint16_t tp_dst = 0;

  static FiveTuple of(const HeaderTuple& h) {
    return {h.ip_src, h.ip_dst, h.ip_proto, h.tp_src, h.tp_dst};
  }
  std::string str() const;

  auto operator<=>(const FiveTuple&) const = default;
};

}  // namespace sdnlab
