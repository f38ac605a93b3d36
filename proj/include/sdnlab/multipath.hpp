#pragma once

#include <map>
#include <vector>

#include "sdnlab/controller.hpp"

namespace sdnlab {

/// Up to `requested_paths` paths in extraction order, link-disjoint apart
/// from the endpoint hosts' own access links.
/// Throws Error(Validation) when no path exists at all.
std::vector<Path> request_paths(const Topology& t, const TransferRequest& r, const LinkSet& excluded = {});

/// A granted striped transfer.
struct StripedTransfer {
  TransferRequest request;
  std::vector<Path> paths;
  int streams_seen = 0;
};

/// Round-robin stream placement: paths[stream_index mod |paths|].
const Path& assign_stream(const StripedTransfer& transfer, int stream_index);

/// Ordered candidate paths handed out one per subflow.
struct PathSet {
  std::string owner;
  std::vector<Path> paths;
  std::size_t cursor = 0;
};

/// Sorts by (hop count, total latency, link-id sequence).
void rank_path_set(const Topology& t, std::vector<Path>& paths);

struct MptcpInstance {
  FiveTuple token;  // five-tuple of the MP_CAPABLE subflow
  std::vector<std::pair<FiveTuple, Path>> subflows;
};

/// smoc bookkeeping: one path set per MPTCP instance, frozen at MP_CAPABLE.
class PathSetRegistry {
 public:
  struct Entry {
    MptcpInstance instance;
    PathSet set;
  };

  /// Creates (or returns the existing) instance for an MP_CAPABLE header
  /// between hosts `src` and `dst`; the initial subflow takes paths[0].
  Entry& on_mp_capable(const Topology& t, const HeaderTuple& h, std::string_view src, std::string_view dst,
                       const LinkSet& excluded = {}, std::size_t k = 8);

  /// Hands the next path of the matching instance to a joining subflow,
  /// wrapping around when the set is exhausted.
  Path on_mp_join(const HeaderTuple& h);

  const Entry* find_instance(const HeaderTuple& h) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Baseline routing plus advance path assignment for striped transfers.
class GridFtpController : public BaselineController {
 public:
  GridFtpController(const Topology& t, AddressBook book, std::string owner = std::string(kRootOwner));

  const std::map<std::string, StripedTransfer>& transfers() const { return transfers_; }

 protected:
  std::vector<Directive> on_packet_in(const PacketIn& pi, int epoch) override;
  std::vector<Directive> on_other(const ControllerEvent& e) override;

 private:
  std::map<std::string, StripedTransfer> transfers_;
  std::vector<std::string> grant_order_;
};

/// Baseline routing plus path sets for MPTCP subflows.
class SmocController : public BaselineController {
 public:
  SmocController(const Topology& t, AddressBook book, std::string owner = std::string(kRootOwner));

  const PathSetRegistry& registry() const { return registry_; }

 protected:
  std::vector<Directive> on_packet_in(const PacketIn& pi, int epoch) override;

 private:
  PathSetRegistry registry_;
};

}  // namespace sdnlab
