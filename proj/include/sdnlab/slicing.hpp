#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdnlab/controller.hpp"

namespace sdnlab {

struct SliceMember {
  std::string host;
  Ipv4 virtual_ip;
};

/// A tenant network. Distinct slices may reuse the same virtual addresses.
struct Slice {
  std::string id;
  std::vector<Ipv4Prefix> virtual_space;
  std::string controller = "baseline";
  std::vector<SliceMember> members;

  bool in_space(Ipv4 a) const;
  std::uint64_t space_size() const;
  /// Position of `a` when the prefixes are laid end to end in declared order.
  std::optional<std::uint32_t> offset_of(Ipv4 a) const;
  Ipv4 at_offset(std::uint32_t offset) const;
  const SliceMember* member(std::string_view host) const;
};

struct PhysicalBlock {
  std::string domain;
  std::string slice;
  Ipv4Prefix prefix;
};

struct TranslationEntry {
  std::string slice;
  Ipv4 virtual_addr;
  Ipv4 physical_addr;

  auto operator<=>(const TranslationEntry&) const = default;
};

inline const Ipv4Prefix kDefaultSliceBase{Ipv4{240u << 24}, 8};
inline constexpr int kSliceBlockLength = 16;

/// Per-domain slicing agent. Owns the switches of its domain and a private
/// namespace of fixed-size physical blocks carved from `base`.
class DomainProxy {
 public:
  DomainProxy(std::string domain, std::set<std::string> switches, Ipv4Prefix base = kDefaultSliceBase,
              int block_length = kSliceBlockLength);

  const std::string& domain() const { return domain_; }
  const std::set<std::string>& switches() const { return switches_; }
  bool manages(std::string_view sw) const { return switches_.count(std::string(sw)) != 0; }
  const Ipv4Prefix& base() const { return base_; }
  bool enabled() const { return enabled_; }
  void set_enabled(bool on) { enabled_ = on; }

  /// Lowest unused block index, if any.
  std::optional<std::uint32_t> free_block() const;
  std::size_t block_capacity() const;
  PhysicalBlock commit(const Slice& s, std::uint32_t index);
  void release(const std::string& slice);

  std::optional<PhysicalBlock> block(std::string_view slice) const;
  std::vector<PhysicalBlock> blocks() const;
  const Slice& slice(std::string_view id) const;
  bool has_slice(std::string_view id) const { return slices_.count(std::string(id)) != 0; }

  /// Virtual -> physical within this domain's block; Error(Isolation) when
  /// `v` lies outside the slice's virtual space.
  Ipv4 to_physical(std::string_view slice, Ipv4 v) const;
  /// Physical -> (slice, virtual), or nullopt when no block contains `p`.
  std::optional<std::pair<std::string, Ipv4>> to_virtual(Ipv4 p) const;

  HeaderTuple translate_egress(std::string_view slice, const HeaderTuple& h);
  std::pair<std::string, HeaderTuple> translate_ingress(const HeaderTuple& h) const;

  std::vector<TranslationEntry> mappings() const;
  /// `slice|virtual|physical|block`, one per line, for audits.
  std::string dump_mappings() const;

 private:
  std::string domain_;
  std::set<std::string> switches_;
  Ipv4Prefix base_;
  int block_length_;
  bool enabled_ = true;
  std::map<std::string, Slice> slices_;
  std::map<std::string, std::uint32_t> block_index_;
  PhysicalBlock make_block(const std::string& slice, std::uint32_t index) const;

  mutable std::set<TranslationEntry> mappings_;
};

/// Rewrites a header leaving `src`'s physical space for `dst`'s.
HeaderTuple translate_inter_domain(const DomainProxy& src, const DomainProxy& dst, std::string_view slice,
                                   const HeaderTuple& h);

/// All proxies of a topology plus the reliable announcement of slice
/// registrations between them.
class Federation {
 public:
  explicit Federation(const Topology& t, const std::map<std::string, Ipv4Prefix>& domain_bases = {});

  /// Every proxy allocates its own block, or none does.
  std::vector<PhysicalBlock> register_slice(const Slice& s);
  void unregister_slice(const std::string& id);

  DomainProxy& proxy(std::string_view domain);
  const DomainProxy& proxy(std::string_view domain) const;
  DomainProxy& proxy_for_switch(std::string_view sw);
  std::vector<DomainProxy>& proxies() { return proxies_; }
  const std::vector<DomainProxy>& proxies() const { return proxies_; }
  const std::map<std::string, Slice>& slices() const { return slices_; }
  /// Slice a host belongs to, if any.
  const Slice* slice_of_host(std::string_view host) const;

 private:
  const Topology& topo_;
  std::vector<DomainProxy> proxies_;
  std::map<std::string, Slice> slices_;
};

/// Root controller for sliced scenarios: routes switch events to the proxy
/// of the switch's domain, which hands a virtual view to the tenant
/// controller and translates the tenant's directives back.
class SliceHypervisor : public Controller {
 public:
  using TenantFactory = std::function<std::unique_ptr<Controller>(const Slice&, AddressBook)>;

  SliceHypervisor(const Topology& t, const std::vector<Slice>& slices, TenantFactory factory,
                  const std::map<std::string, Ipv4Prefix>& domain_bases = {});

  std::vector<Directive> handle_event(const ControllerEvent& e) override;

  /// Hands `e`, already in `slice`'s virtual view, to the tenant through
  /// `p` and returns the tenant's directives in physical form. Each
  /// directive is translated by the proxy owning its switch; rejected ones
  /// are recorded as violations.
  std::vector<Directive> mediate_tenant(DomainProxy& p, const std::string& slice, const ControllerEvent& e);

  Federation& federation() { return federation_; }
  const Federation& federation() const { return federation_; }
  void set_proxy_enabled(std::string_view domain, bool on) { federation_.proxy(domain).set_enabled(on); }

  struct Delivery {
    int epoch = 0;
    std::string slice;
    std::string flow;  // empty for events without a flow
    std::string line;
  };
  const std::vector<Delivery>& deliveries() const { return deliveries_; }
  /// Tenant directives refused for crossing slice boundaries.
  const std::vector<std::string>& violations() const { return violations_; }
  /// Events and directives dropped for other reasons (unattributable
  /// traffic, disabled proxies).
  const std::vector<std::string>& drops() const { return drops_; }
  std::optional<std::string> slice_of_flow(const std::string& flow) const;

 private:
  std::vector<Directive> to_physical(const std::string& slice, const Directive& d, int epoch);
  std::vector<Directive> translate_install(const std::string& slice, const InstallDirective& d);
  void violation(int epoch, const std::string& slice, const std::string& what);
  void drop(int epoch, const std::string& what);
  std::vector<Directive> deliver(const std::string& slice, const ControllerEvent& e, const std::string& flow);

  const Topology& topo_;
  Federation federation_;
  std::map<std::string, std::unique_ptr<Controller>> tenants_;
  std::map<std::string, std::string> flow_slice_;
  std::vector<Delivery> deliveries_;
  std::vector<std::string> violations_;
  std::vector<std::string> drops_;
};

}  // namespace sdnlab
