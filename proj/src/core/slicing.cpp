#include "sdnlab/slicing.hpp"

#include <algorithm>

#include "sdnlab/error.hpp"

namespace sdnlab {

// ---- Slice ----------------------------------------------------------------

bool Slice::in_space(Ipv4 a) const {
  return std::any_of(virtual_space.begin(), virtual_space.end(), [&](const Ipv4Prefix& p) { return p.contains(a); });
}

std::uint64_t Slice::space_size() const {
  std::uint64_t n = 0;
  for (const auto& p : virtual_space) n += p.size();
  return n;
}

std::optional<std::uint32_t> Slice::offset_of(Ipv4 a) const {
  std::uint64_t acc = 0;
  for (const auto& p : virtual_space) {
    if (p.contains(a)) return static_cast<std::uint32_t>(acc + (a.value - p.base.value));
    acc += p.size();
  }
  return std::nullopt;
}

Ipv4 Slice::at_offset(std::uint32_t offset) const {
  std::uint64_t rest = offset;
  for (const auto& p : virtual_space) {
    if (rest < p.size()) return Ipv4{p.base.value + static_cast<std::uint32_t>(rest)};
    rest -= p.size();
  }
  throw Error(ErrorKind::Isolation, "offset " + std::to_string(offset) + " outside the space of slice '" + id + "'");
}

const SliceMember* Slice::member(std::string_view host) const {
  for (const auto& m : members) {
    if (m.host == host) return &m;
  }
  return nullptr;
}

// ---- DomainProxy ------------------------------------------------------------

DomainProxy::DomainProxy(std::string domain, std::set<std::string> switches, Ipv4Prefix base, int block_length)
    : domain_(std::move(domain)), switches_(std::move(switches)), base_(base), block_length_(block_length) {
  if (block_length_ < base_.length || block_length_ > 32) {
    throw Error(ErrorKind::Validation, "block length /" + std::to_string(block_length_) + " does not fit base " +
                                           base_.str());
  }
  if ((base_.base.value & ~base_.mask()) != 0) {
    throw Error(ErrorKind::Validation, "physical base " + base_.str() + " has host bits set");
  }
}

std::size_t DomainProxy::block_capacity() const { return std::size_t{1} << (block_length_ - base_.length); }

std::optional<std::uint32_t> DomainProxy::free_block() const {
  std::set<std::uint32_t> used;
  for (const auto& [slice, idx] : block_index_) used.insert(idx);
  for (std::uint32_t i = 0; i < block_capacity(); ++i) {
    if (!used.count(i)) return i;
  }
  return std::nullopt;
}

PhysicalBlock DomainProxy::make_block(const std::string& slice, std::uint32_t index) const {
  const std::uint32_t size_bits = 32 - block_length_;
  const std::uint64_t start = std::uint64_t{base_.base.value} + (std::uint64_t{index} << size_bits);
  return PhysicalBlock{domain_, slice, Ipv4Prefix{Ipv4{static_cast<std::uint32_t>(start)}, block_length_}};
}

PhysicalBlock DomainProxy::commit(const Slice& s, std::uint32_t index) {
  if (block_index_.count(s.id)) throw Error(ErrorKind::Validation, "slice '" + s.id + "' already has a block in " + domain_);
  if (index >= block_capacity()) throw Error(ErrorKind::Exhausted, "block index out of range in " + domain_);
  if (s.space_size() > (std::uint64_t{1} << (32 - block_length_))) {
    throw Error(ErrorKind::Validation, "virtual space of slice '" + s.id + "' exceeds the /" +
                                           std::to_string(block_length_) + " block size");
  }
  slices_[s.id] = s;
  block_index_[s.id] = index;
  return make_block(s.id, index);
}

void DomainProxy::release(const std::string& slice) {
  block_index_.erase(slice);
  slices_.erase(slice);
  for (auto it = mappings_.begin(); it != mappings_.end();) {
    it = it->slice == slice ? mappings_.erase(it) : std::next(it);
  }
}

std::optional<PhysicalBlock> DomainProxy::block(std::string_view slice) const {
  auto it = block_index_.find(std::string(slice));
  if (it == block_index_.end()) return std::nullopt;
  return make_block(it->first, it->second);
}

std::vector<PhysicalBlock> DomainProxy::blocks() const {
  std::vector<PhysicalBlock> out;
  for (const auto& [slice, idx] : block_index_) out.push_back(make_block(slice, idx));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.prefix < b.prefix; });
  return out;
}

const Slice& DomainProxy::slice(std::string_view id) const {
  auto it = slices_.find(std::string(id));
  if (it == slices_.end()) throw Error(ErrorKind::UnknownEntity, "slice '" + std::string(id) + "' unknown to " + domain_);
  return it->second;
}

Ipv4 DomainProxy::to_physical(std::string_view slice_id, Ipv4 v) const {
  const auto& s = slice(slice_id);
  auto off = s.offset_of(v);
  if (!off) {
    throw Error(ErrorKind::Isolation, v.str() + " is outside the virtual space of slice '" + s.id + "'");
  }
  const Ipv4 p{block(slice_id)->prefix.base.value + *off};
  mappings_.insert(TranslationEntry{s.id, v, p});
  return p;
}

std::optional<std::pair<std::string, Ipv4>> DomainProxy::to_virtual(Ipv4 p) const {
  for (const auto& [id, idx] : block_index_) {
    const auto b = make_block(id, idx);
    if (!b.prefix.contains(p)) continue;
    const auto& s = slices_.at(id);
    const std::uint64_t off = p.value - b.prefix.base.value;
    if (off >= s.space_size()) return std::nullopt;
    return std::make_pair(id, s.at_offset(static_cast<std::uint32_t>(off)));
  }
  return std::nullopt;
}

HeaderTuple DomainProxy::translate_egress(std::string_view slice_id, const HeaderTuple& h) {
  HeaderTuple out = h;
  out.ip_src = to_physical(slice_id, h.ip_src);
  out.ip_dst = to_physical(slice_id, h.ip_dst);
  return out;
}

std::pair<std::string, HeaderTuple> DomainProxy::translate_ingress(const HeaderTuple& h) const {
  auto src = to_virtual(h.ip_src);
  auto dst = to_virtual(h.ip_dst);
  if (!src || !dst || src->first != dst->first) {
    throw Error(ErrorKind::Isolation, "header " + h.str() + " is not attributable to one slice in " + domain_);
  }
  HeaderTuple out = h;
  out.ip_src = src->second;
  out.ip_dst = dst->second;
  return {src->first, out};
}

std::vector<TranslationEntry> DomainProxy::mappings() const { return {mappings_.begin(), mappings_.end()}; }

std::string DomainProxy::dump_mappings() const {
  std::string out;
  for (const auto& m : mappings_) {
    out += m.slice + "|" + m.virtual_addr.str() + "|" + m.physical_addr.str() + "|" + block(m.slice)->prefix.str() +
           "\n";
  }
  return out;
}

HeaderTuple translate_inter_domain(const DomainProxy& src, const DomainProxy& dst, std::string_view slice,
                                   const HeaderTuple& h) {
  auto s = src.to_virtual(h.ip_src);
  auto d = src.to_virtual(h.ip_dst);
  if (!s || !d || s->first != slice || d->first != slice) {
    throw Error(ErrorKind::Isolation, "header " + h.str() + " is not in the block of slice '" + std::string(slice) +
                                          "' in " + src.domain());
  }
  HeaderTuple out = h;
  out.ip_src = dst.to_physical(slice, s->second);
  out.ip_dst = dst.to_physical(slice, d->second);
  return out;
}

// ---- Federation -------------------------------------------------------------

Federation::Federation(const Topology& t, const std::map<std::string, Ipv4Prefix>& domain_bases) : topo_(t) {
  std::map<std::string, std::set<std::string>> by_domain;
  for (const auto& n : t.nodes()) {
    if (n.kind == NodeKind::Switch) by_domain[n.domain].insert(n.id);
  }
  for (const auto& [domain, base] : domain_bases) {
    if (!by_domain.count(domain)) throw Error(ErrorKind::UnknownEntity, "no switches in domain '" + domain + "'");
  }
  for (auto& [domain, switches] : by_domain) {
    auto it = domain_bases.find(domain);
    proxies_.emplace_back(domain, std::move(switches), it == domain_bases.end() ? kDefaultSliceBase : it->second);
  }
}

std::vector<PhysicalBlock> Federation::register_slice(const Slice& s) {
  if (s.id.empty()) throw Error(ErrorKind::Validation, "slice id is empty");
  if (slices_.count(s.id)) throw Error(ErrorKind::Validation, "slice '" + s.id + "' already registered");
  if (s.virtual_space.empty()) throw Error(ErrorKind::Validation, "slice '" + s.id + "' has an empty virtual space");
  for (std::size_t i = 0; i < s.virtual_space.size(); ++i) {
    const auto& p = s.virtual_space[i];
    if ((p.base.value & ~p.mask()) != 0) {
      throw Error(ErrorKind::Validation, "virtual prefix " + p.str() + " of slice '" + s.id + "' has host bits set");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (p.overlaps(s.virtual_space[j])) {
        throw Error(ErrorKind::Validation, "slice '" + s.id + "' has overlapping prefixes " +
                                               s.virtual_space[j].str() + " and " + p.str());
      }
    }
  }
  std::set<std::uint32_t> vips;
  for (const auto& m : s.members) {
    const auto& n = topo_.node(m.host);
    if (n.kind != NodeKind::Host) throw Error(ErrorKind::Validation, "slice member '" + m.host + "' is not a host");
    if (const auto* other = slice_of_host(m.host)) {
      throw Error(ErrorKind::Validation, "host '" + m.host + "' already belongs to slice '" + other->id + "'");
    }
    if (!s.in_space(m.virtual_ip)) {
      throw Error(ErrorKind::Validation, "virtual address " + m.virtual_ip.str() + " of '" + m.host +
                                             "' is outside slice '" + s.id + "'");
    }
    if (!vips.insert(m.virtual_ip.value).second) {
      throw Error(ErrorKind::Validation, "virtual address " + m.virtual_ip.str() + " used twice in slice '" + s.id + "'");
    }
  }
  if (std::count_if(s.members.begin(), s.members.end(), [&](const auto& m) { return s.member(m.host) != &m; }) != 0) {
    throw Error(ErrorKind::Validation, "slice '" + s.id + "' lists a host twice");
  }

  // Reserve everywhere before committing anywhere.
  std::vector<std::uint32_t> picks;
  for (const auto& p : proxies_) {
    for (const auto& v : s.virtual_space) {
      if (v.overlaps(p.base())) {
        throw Error(ErrorKind::Validation, "virtual prefix " + v.str() + " of slice '" + s.id +
                                               "' overlaps the physical space of domain '" + p.domain() + "'");
      }
    }
    auto idx = p.free_block();
    if (!idx) {
      throw Error(ErrorKind::Exhausted, "physical address blocks exhausted in domain '" + p.domain() +
                                            "' while registering slice '" + s.id + "'");
    }
    picks.push_back(*idx);
  }
  std::vector<PhysicalBlock> out;
  for (std::size_t i = 0; i < proxies_.size(); ++i) out.push_back(proxies_[i].commit(s, picks[i]));
  slices_[s.id] = s;
  return out;
}

void Federation::unregister_slice(const std::string& id) {
  if (!slices_.erase(id)) throw Error(ErrorKind::UnknownEntity, "slice '" + id + "' is not registered");
  for (auto& p : proxies_) p.release(id);
}

DomainProxy& Federation::proxy(std::string_view domain) {
  return const_cast<DomainProxy&>(std::as_const(*this).proxy(domain));
}

const DomainProxy& Federation::proxy(std::string_view domain) const {
  for (const auto& p : proxies_) {
    if (p.domain() == domain) return p;
  }
  throw Error(ErrorKind::UnknownEntity, "no proxy for domain '" + std::string(domain) + "'");
}

DomainProxy& Federation::proxy_for_switch(std::string_view sw) {
  const auto& n = topo_.node(sw);
  if (n.kind != NodeKind::Switch) throw Error(ErrorKind::Validation, "'" + n.id + "' is not a switch");
  return proxy(n.domain);
}

const Slice* Federation::slice_of_host(std::string_view host) const {
  for (const auto& [id, s] : slices_) {
    if (s.member(host) != nullptr) return &s;
  }
  return nullptr;
}

// ---- SliceHypervisor --------------------------------------------------------

SliceHypervisor::SliceHypervisor(const Topology& t, const std::vector<Slice>& slices, TenantFactory factory,
                                 const std::map<std::string, Ipv4Prefix>& domain_bases)
    : topo_(t), federation_(t, domain_bases) {
  for (const auto& s : slices) {
    federation_.register_slice(s);
    AddressBook book;
    for (const auto& m : s.members) book.add(m.virtual_ip, m.host);
    tenants_[s.id] = factory(s, std::move(book));
    if (!tenants_[s.id]) throw Error(ErrorKind::Validation, "no tenant controller for slice '" + s.id + "'");
  }
}

std::optional<std::string> SliceHypervisor::slice_of_flow(const std::string& flow) const {
  auto it = flow_slice_.find(flow);
  if (it == flow_slice_.end()) return std::nullopt;
  return it->second;
}

void SliceHypervisor::violation(int epoch, const std::string& slice, const std::string& what) {
  violations_.push_back(std::to_string(epoch) + " " + slice + ": " + what);
}

void SliceHypervisor::drop(int epoch, const std::string& what) { drops_.push_back(std::to_string(epoch) + " " + what); }

std::vector<Directive> SliceHypervisor::handle_event(const ControllerEvent& e) {
  std::vector<Directive> out;
  auto append = [&](std::vector<Directive> ds) { out.insert(out.end(), ds.begin(), ds.end()); };

  if (const auto* pi = std::get_if<PacketIn>(&e.body)) {
    auto& p = federation_.proxy_for_switch(pi->switch_id);
    if (!p.enabled()) {
      drop(e.epoch, "packet_in at " + pi->switch_id + ": proxy " + p.domain() + " is disabled");
      return out;
    }
    std::string slice;
    HeaderTuple vh = pi->header;
    const auto* link = topo_.link_at_port(pi->switch_id, pi->port);
    const std::string* host = nullptr;
    if (link != nullptr && topo_.node(link->other(pi->switch_id)).kind == NodeKind::Host) {
      host = &link->other(pi->switch_id);
    }
    if (host != nullptr) {
      // Hosts speak their slice's virtual addresses.
      const auto* s = federation_.slice_of_host(*host);
      if (s == nullptr) {
        drop(e.epoch, "packet_in from host '" + *host + "' outside every slice");
        return out;
      }
      if (!s->in_space(vh.ip_src) || !s->in_space(vh.ip_dst)) {
        violation(e.epoch, s->id, "host '" + *host + "' sent " + vh.str() + " outside its virtual space");
        return out;
      }
      slice = s->id;
    } else {
      try {
        std::tie(slice, vh) = p.translate_ingress(pi->header);
      } catch (const Error& err) {
        drop(e.epoch, std::string("packet_in at ") + pi->switch_id + ": " + err.what());
        return out;
      }
    }
    auto [it, fresh] = flow_slice_.try_emplace(pi->flow, slice);
    if (!fresh && it->second != slice) {
      violation(e.epoch, slice, "flow '" + pi->flow + "' already belongs to slice '" + it->second + "'");
      return out;
    }
    return mediate_tenant(p, slice, ControllerEvent{e.epoch, PacketIn{pi->switch_id, pi->port, vh, pi->flow}});
  }

  auto owner_of = [&](const std::string& flow) -> std::optional<std::string> { return slice_of_flow(flow); };
  if (const auto* fe = std::get_if<FlowEnded>(&e.body)) {
    if (auto s = owner_of(fe->flow)) append(deliver(*s, e, fe->flow));
    return out;
  }
  if (const auto* fs = std::get_if<FlowStats>(&e.body)) {
    if (auto s = owner_of(fs->flow)) append(deliver(*s, e, fs->flow));
    return out;
  }
  if (const auto* tr = std::get_if<TransferRequest>(&e.body)) {
    const auto* s = federation_.slice_of_host(tr->src);
    if (s == nullptr || s->member(tr->dst) == nullptr) {
      drop(e.epoch, "transfer_request " + tr->id + " does not stay inside one slice");
      return out;
    }
    append(deliver(s->id, e, ""));
    return out;
  }
  // Network-wide state goes to every tenant.
  for (const auto& [id, tenant] : tenants_) append(deliver(id, e, ""));
  return out;
}

std::vector<Directive> SliceHypervisor::mediate_tenant(DomainProxy& p, const std::string& slice,
                                                       const ControllerEvent& e) {
  if (!p.enabled()) {
    drop(e.epoch, "proxy " + p.domain() + " is disabled");
    return {};
  }
  if (!p.has_slice(slice)) throw Error(ErrorKind::UnknownEntity, "slice '" + slice + "' unknown to " + p.domain());
  std::string flow;
  if (const auto* pi = std::get_if<PacketIn>(&e.body)) flow = pi->flow;
  return deliver(slice, e, flow);
}

std::vector<Directive> SliceHypervisor::deliver(const std::string& slice, const ControllerEvent& e,
                                                const std::string& flow) {
  deliveries_.push_back(Delivery{e.epoch, slice, flow, to_line(e)});
  std::vector<Directive> out;
  for (const auto& d : tenants_.at(slice)->handle_event(e)) {
    auto ds = to_physical(slice, d, e.epoch);
    out.insert(out.end(), ds.begin(), ds.end());
  }
  return out;
}

std::vector<Directive> SliceHypervisor::to_physical(const std::string& slice, const Directive& d, int epoch) {
  const std::string line = to_line(d);
  try {
    if (const auto* rf = std::get_if<RouteFlowDirective>(&d)) {
      auto owner = slice_of_flow(rf->flow);
      if (!owner || *owner != slice) throw Error(ErrorKind::Isolation, "flow is not in the slice");
      const auto& s = federation_.slices().at(slice);
      if (s.member(rf->path.src) == nullptr || s.member(rf->path.dst) == nullptr) {
        throw Error(ErrorKind::Isolation, "path leaves the slice's hosts");
      }
      // A path through an unreachable domain cannot be realised.
      for (const auto& n : topo_.path_nodes(rf->path)) {
        if (topo_.node(n).kind != NodeKind::Switch) continue;
        const auto& q = federation_.proxy_for_switch(n);
        if (!q.enabled()) {
          drop(epoch, "route for " + rf->flow + " crosses disabled proxy " + q.domain());
          return {};
        }
      }
      return {d};
    }
    const std::string& sw = std::holds_alternative<InstallDirective>(d) ? std::get<InstallDirective>(d).switch_id
                                                                          : std::get<RemoveDirective>(d).switch_id;
    if (!topo_.has_node(sw) || topo_.node(sw).kind != NodeKind::Switch) {
      throw Error(ErrorKind::Isolation, "target '" + sw + "' is not a switch");
    }
    auto& q = federation_.proxy_for_switch(sw);
    if (!q.enabled()) {
      drop(epoch, "directive for " + sw + " not delivered: proxy " + q.domain() + " is disabled: " + line);
      return {};
    }
    if (const auto* rm = std::get_if<RemoveDirective>(&d)) return {RemoveDirective{sw, slice + "/" + rm->cookie}};
    return translate_install(slice, std::get<InstallDirective>(d));
  } catch (const Error& err) {
    violation(epoch, slice, "rejected '" + line + "': " + err.what());
    return {};
  }
}

std::vector<Directive> SliceHypervisor::translate_install(const std::string& slice, const InstallDirective& d) {
  const auto& s = federation_.slices().at(slice);
  const auto& sw = d.switch_id;
  auto& q = federation_.proxy_for_switch(sw);
  const FlowEntry& e = d.entry;
  const MatchPattern& m = e.match;
  auto deny = [](const std::string& why) { return Error(ErrorKind::Isolation, why); };

  for (const auto* ip : {&m.ip_src, &m.ip_dst}) {
    if (*ip && !s.in_space(**ip)) throw deny("match on " + (*ip)->str() + " outside the virtual space");
  }
  auto host_behind = [&](std::uint32_t port) -> const std::string* {
    const auto* l = topo_.link_at_port(sw, port);
    if (l == nullptr) throw deny("switch " + sw + " has no port " + std::to_string(port));
    const auto& n = l->other(sw);
    return topo_.node(n).kind == NodeKind::Host ? &n : nullptr;
  };

  std::vector<std::uint32_t> host_ports;
  bool from_host_only = false;
  if (m.in_port) {
    if (const auto* h = host_behind(*m.in_port)) {
      if (s.member(*h) == nullptr) throw deny("in_port " + std::to_string(*m.in_port) + " faces foreign host '" + *h + "'");
      host_ports.push_back(*m.in_port);
      from_host_only = true;
    }
  } else {
    for (const auto& inc : topo_.incident(topo_.node_index(sw))) {
      const auto& n = topo_.nodes()[inc.neighbor];
      if (n.kind == NodeKind::Host && s.member(n.id) != nullptr) host_ports.push_back(inc.port);
    }
  }

  // Addresses the packet carries when it reaches the output action.
  std::optional<Ipv4> vsrc = m.ip_src;
  std::optional<Ipv4> vdst = m.ip_dst;
  for (const auto& a : e.actions) {
    const auto* sf = std::get_if<SetFieldAction>(&a);
    if (sf == nullptr || (sf->field != Field::IpSrc && sf->field != Field::IpDst)) continue;
    const Ipv4 v{static_cast<std::uint32_t>(sf->value)};
    if (sf->value > 0xffffffffULL || !s.in_space(v)) throw deny("set_field to " + v.str() + " outside the virtual space");
    (sf->field == Field::IpSrc ? vsrc : vdst) = v;
  }

  enum class Egress { None, Host, Local, Remote };
  Egress egress = Egress::None;
  const DomainProxy* remote = nullptr;
  if (auto port = e.output_port()) {
    const auto* l = topo_.link_at_port(sw, *port);
    if (l == nullptr) throw deny("switch " + sw + " has no port " + std::to_string(*port));
    const auto& n = topo_.node(l->other(sw));
    if (n.kind == NodeKind::Host) {
      if (s.member(n.id) == nullptr) throw deny("output toward foreign host '" + n.id + "'");
      egress = Egress::Host;
    } else if (n.domain == q.domain()) {
      egress = Egress::Local;
    } else {
      egress = Egress::Remote;
      remote = &federation_.proxy(n.domain);
    }
  }
  auto exact = [&] {
    if (!vsrc || !vdst) throw deny("rule leaving its address space must match exact ip_src and ip_dst");
  };
  auto rewrite = [&](std::vector<Action>& acts, const std::function<Ipv4(Ipv4)>& f) {
    exact();
    acts.push_back(set_ip(Field::IpSrc, f(*vsrc)));
    acts.push_back(set_ip(Field::IpDst, f(*vdst)));
  };
  auto local_phys = [&](Ipv4 v) { return q.to_physical(slice, v); };
  auto remote_phys = [&](Ipv4 v) { return remote->to_physical(slice, v); };

  auto make = [&](MatchPattern nm, bool transit) {
    std::vector<Action> acts;
    for (const auto& a : e.actions) {
      if (const auto* sf = std::get_if<SetFieldAction>(&a);
          sf != nullptr && transit && (sf->field == Field::IpSrc || sf->field == Field::IpDst)) {
        acts.push_back(set_ip(sf->field, local_phys(Ipv4{static_cast<std::uint32_t>(sf->value)})));
        continue;
      }
      if (std::holds_alternative<OutputAction>(a)) {
        if (transit && egress == Egress::Host) rewrite(acts, [](Ipv4 v) { return v; });
        if (!transit && egress == Egress::Local) rewrite(acts, local_phys);
        if (egress == Egress::Remote) rewrite(acts, remote_phys);
      }
      acts.push_back(a);
    }
    FlowEntry fe;
    fe.priority = e.priority;
    fe.match = std::move(nm);
    fe.actions = std::move(acts);
    fe.cookie = slice + "/" + e.cookie;
    fe.owner = slice;
    return Directive{InstallDirective{sw, std::move(fe)}};
  };

  std::vector<Directive> out;
  // Transit traffic is only reachable through the slice's block, so the rule
  // must pin at least one address; wildcard rules act on member ports only.
  if (!from_host_only && (m.ip_src || m.ip_dst)) {
    MatchPattern nm = m;
    nm.match_all = false;
    if (m.ip_src) nm.ip_src = local_phys(*m.ip_src);
    if (m.ip_dst) nm.ip_dst = local_phys(*m.ip_dst);
    out.push_back(make(std::move(nm), true));
  }
  for (auto port : host_ports) {
    MatchPattern nm = m;
    nm.match_all = false;
    nm.in_port = port;
    out.push_back(make(std::move(nm), false));
  }
  return out;
}

}  // namespace sdnlab
