#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sdnlab/net.hpp"
#include "sdnlab/topo.hpp"

namespace sdnlab {

/// Header fields a set_field action may rewrite.
enum class Field { EthSrc, EthDst, IpSrc, IpDst, TpSrc, TpDst };

std::string_view to_string(Field f);
Field parse_field(std::string_view name);

/// Exact-or-wildcard match; an absent field is a wildcard.
struct MatchPattern {
  std::optional<std::uint32_t> in_port;
  std::optional<std::uint64_t> eth_src;
  std::optional<std::uint64_t> eth_dst;
  std::optional<Ipv4> ip_src;
  std::optional<Ipv4> ip_dst;
  std::optional<std::uint8_t> ip_proto;
  std::optional<std::uint16_t> tp_src;
  std::optional<std::uint16_t> tp_dst;
  std::optional<std::uint8_t> tcp_options;
  bool match_all = false;

  static MatchPattern all() {
    MatchPattern m;
    m.match_all = true;
    return m;
  }
  /// Exact match on addresses, protocol and ports of `h`.
  static MatchPattern five_tuple(const HeaderTuple& h);

  bool empty() const;
  std::size_t specified_fields() const;
  bool matches(const HeaderTuple& h) const;

  std::string str() const;  // "*" or comma-separated key=value in fixed order
  static MatchPattern parse(std::string_view text);

  bool operator==(const MatchPattern&) const = default;
};

struct OutputAction {
  std::uint32_t port = 0;
  bool operator==(const OutputAction&) const = default;
};
struct SetFieldAction {
  Field field = Field::IpDst;
  std::uint64_t value = 0;
  bool operator==(const SetFieldAction&) const = default;
};
struct DropAction {
  bool operator==(const DropAction&) const = default;
};
using Action = std::variant<OutputAction, SetFieldAction, DropAction>;

std::string format_actions(const std::vector<Action>& actions);
std::vector<Action> parse_actions(std::string_view text);

/// Applies a set_field to a header.
void apply_set_field(HeaderTuple& h, const SetFieldAction& a);
SetFieldAction set_ip(Field f, Ipv4 v);

inline constexpr std::string_view kRootOwner = "root";

struct FlowEntry {
  int priority = 0;
  MatchPattern match;
  std::vector<Action> actions;
  std::string cookie;
  std::string owner{kRootOwner};

  /// Throws Error(Validation) when an entry invariant is violated.
  void validate() const;
  std::optional<std::uint32_t> output_port() const;

  /// `priority|owner|match-fields|actions|cookie`
  std::string dump() const;
  static FlowEntry parse(std::string_view line);

  bool operator==(const FlowEntry&) const = default;
};

struct EntryHandle {
  std::string switch_id;
  std::uint64_t sequence = 0;
};

/// One switch's prioritised table. Equal priorities resolve by install order.
class FlowTable {
 public:
  std::uint64_t install(FlowEntry e);
  std::size_t remove_cookie(std::string_view cookie);
  const FlowEntry* classify(const HeaderTuple& h) const;
  std::vector<const FlowEntry*> entries() const;  // classification order
  std::size_t size() const { return entries_.size(); }

 private:
  struct Slot {
    FlowEntry entry;
    std::uint64_t seq;
  };
  std::vector<Slot> entries_;  // kept sorted by (priority desc, seq asc)
  std::uint64_t next_seq_ = 0;
};

/// Tables for every switch of a topology.
class SwitchTables {
 public:
  explicit SwitchTables(const Topology& t);

  EntryHandle install_entry(std::string_view sw, FlowEntry e);
  std::size_t remove(std::string_view sw, std::string_view cookie);
  const FlowEntry* classify(std::string_view sw, const HeaderTuple& h) const;
  const FlowTable& table(std::string_view sw) const;

  /// Entries owned by `owner` across all switches as (switch, entry).
  std::vector<std::pair<std::string, FlowEntry>> by_owner(std::string_view owner) const;
  /// Dump of every table, switches in id order.
  std::string dump() const;

 private:
  FlowTable& mutable_table(std::string_view sw);
  std::map<std::string, FlowTable, std::less<>> tables_;
};

struct TraceHop {
  std::string switch_id;
  std::string cookie;
  HeaderTuple header;  // after the entry's actions
  std::string out_link;
};

enum class TraceTerminal { Delivered, Dropped, PacketIn };

struct ForwardTrace {
  std::vector<TraceHop> hops;
  TraceTerminal terminal = TraceTerminal::Dropped;
  std::string where;  // delivered host, or switch raising the packet-in / drop
  bool loop = false;
  HeaderTuple final_header;

  std::vector<std::string> links() const;
};

struct ForwardOptions {
  std::size_t hop_limit = 64;
  const LinkSet* down_links = nullptr;
};

/// Walks a packet through the tables from `(ingress_switch, ingress_port)`.
ForwardTrace forward(const Topology& t, const SwitchTables& tables, std::string_view ingress_switch,
                     std::uint32_t ingress_port, HeaderTuple h, const ForwardOptions& opts = {});

}  // namespace sdnlab
