#include "sdnlab/simulator.hpp"

#include <algorithm>
#include <set>

#include "sdnlab/error.hpp"

namespace sdnlab {
namespace {

class Run {
 public:
  Run(const Topology& t, Controller& c, const RunOptions& opts)
      : topo_(t), controller_(c), opts_(opts), tables_(t), monitor_(opts.monitor_alpha) {}

  RunResult execute(const std::vector<SimEvent>& events) {
    if (opts_.epochs < 1) throw Error(ErrorKind::Validation, "epochs must be >= 1");
    for (std::size_t i = 1; i < events.size(); ++i) {
      if (events[i].at_epoch < events[i - 1].at_epoch) throw Error(ErrorKind::Validation, "events are not sorted by epoch");
    }
    std::size_t next = 0;
    std::vector<ControllerEventBody> pending;
    for (int epoch = 0; epoch < opts_.epochs; ++epoch) {
      for (auto& body : pending) deliver(epoch, std::move(body));
      pending.clear();
      while (next < events.size() && events[next].at_epoch <= epoch) {
        if (events[next].at_epoch < 0) throw Error(ErrorKind::Validation, "event scheduled before epoch 0");
        apply(epoch, events[next++]);
      }
      deliver(epoch, EpochTick{epoch});

      auto flows = active_flows();
      std::vector<TrafficFlow> routed;
      for (const auto& f : flows) {
        if (f.path) routed.push_back(f);
      }
      EpochRecord rec;
      rec.epoch = epoch;
      rec.allocation = allocate_max_min(topo_, routed, down_);
      for (const auto& f : flows) {
        rec.allocation.try_emplace(f.id, 0.0);
        rec.paths[f.id] = f.path ? f.path->str() : std::string();
      }
      result_.series.push_back(std::move(rec));
      pending = monitor_.sample(topo_, routed, result_.series.back().allocation, down_);
    }
    for (const auto& [id, f] : active_) result_.flows[id] = f;
    return std::move(result_);
  }

 private:
  std::vector<TrafficFlow> active_flows() const {
    std::vector<TrafficFlow> out;
    for (const auto& [id, f] : active_) out.push_back(f);
    return out;
  }

  void apply(int epoch, const SimEvent& ev) {
    switch (ev.kind) {
      case SimEventKind::FlowStart: start_flow(epoch, *ev.flow); break;
      case SimEventKind::FlowStop: {
        auto it = active_.find(ev.subject);
        if (it == active_.end()) throw Error(ErrorKind::Validation, "flow_stop for inactive flow '" + ev.subject + "'");
        result_.flows[ev.subject] = it->second;
        active_.erase(it);
        deliver(epoch, FlowEnded{ev.subject});
        break;
      }
      case SimEventKind::LinkFail:
        topo_.link(ev.subject);
        down_.insert(ev.subject);
        deliver(epoch, PortStatus{ev.subject, false});
        break;
      case SimEventKind::LinkRestore:
        topo_.link(ev.subject);
        down_.erase(ev.subject);
        deliver(epoch, PortStatus{ev.subject, true});
        break;
      case SimEventKind::Notify: deliver(epoch, *ev.notice); break;
    }
  }

  void start_flow(int epoch, TrafficFlow f) {
    if (active_.count(f.id) || result_.flows.count(f.id)) {
      throw Error(ErrorKind::Validation, "flow id '" + f.id + "' started twice");
    }
    for (const auto* end : {&f.src, &f.dst}) {
      if (topo_.node(*end).kind != NodeKind::Host) throw Error(ErrorKind::Validation, "flow endpoint '" + *end + "' is not a host");
    }
    const auto& src = topo_.node(f.src);
    auto inc = topo_.incident(topo_.node_index(f.src));
    if (inc.empty()) throw Error(ErrorKind::Validation, "host '" + f.src + "' has no links");
    const auto& link = topo_.links()[inc.front().link];
    const auto& sw = link.other(src.id);
    f.path.reset();
    f.header.in_port = topo_.port_of(sw, link.id);
    f.header.validate();
    active_.emplace(f.id, f);
    if (f.class_hint) deliver(epoch, AppDeclaration{MatchPattern::five_tuple(f.header), *f.class_hint});
    deliver(epoch, PacketIn{sw, f.header.in_port, f.header, f.id});
  }

  void deliver(int epoch, ControllerEventBody body) {
    ControllerEvent ev{epoch, std::move(body)};
    result_.event_log.push_back(to_line(ev));
    auto directives = controller_.handle_event(ev);
    std::vector<std::string> routed;
    for (const auto& d : directives) {
      result_.directive_log.push_back(std::to_string(epoch) + " " + to_line(d));
      try {
        apply_directive(d, routed);
      } catch (const Error& e) {
        throw Error(ErrorKind::Directive, "epoch " + std::to_string(epoch) + ": directive '" + to_line(d) +
                                              "' rejected: " + e.what());
      }
    }
    for (const auto& flow : routed) trace(epoch, flow);
  }

  void apply_directive(const Directive& d, std::vector<std::string>& routed) {
    if (auto* i = std::get_if<InstallDirective>(&d)) {
      tables_.install_entry(i->switch_id, i->entry);
    } else if (auto* r = std::get_if<RemoveDirective>(&d)) {
      tables_.remove(r->switch_id, r->cookie);
    } else {
      const auto& rf = std::get<RouteFlowDirective>(d);
      auto it = active_.find(rf.flow);
      if (it == active_.end()) throw Error(ErrorKind::UnknownEntity, "unknown flow '" + rf.flow + "'");
      if (rf.path.src != it->second.src || rf.path.dst != it->second.dst) {
        throw Error(ErrorKind::Validation, "path endpoints do not match flow '" + rf.flow + "'");
      }
      topo_.path_nodes(rf.path);
      it->second.path = rf.path;
      if (std::find(routed.begin(), routed.end(), rf.flow) == routed.end()) routed.push_back(rf.flow);
    }
  }

  void trace(int epoch, const std::string& flow) {
    const auto& f = active_.at(flow);
    const auto& first = topo_.link(f.path->hops.front());
    const auto& sw = first.other(f.src);
    ForwardOptions fo;
    fo.hop_limit = opts_.hop_limit;
    fo.down_links = &down_;
    RouteTrace rt;
    rt.epoch = epoch;
    rt.flow = flow;
    rt.trace = forward(topo_, tables_, sw, topo_.port_of(sw, first.id), f.header, fo);
    auto links = rt.trace.links();
    links.insert(links.begin(), first.id);
    rt.follows_path = rt.trace.terminal == TraceTerminal::Delivered && rt.trace.where == f.dst && links == f.path->hops;
    result_.traces.push_back(std::move(rt));
  }

  const Topology& topo_;
  Controller& controller_;
  RunOptions opts_;
  SwitchTables tables_;
  LinkMonitor monitor_;
  LinkSet down_;
  std::map<std::string, TrafficFlow> active_;
  RunResult result_;
};

}  // namespace

RunResult run(const Topology& t, const std::vector<SimEvent>& events, Controller& controller, const RunOptions& opts) {
  return Run(t, controller, opts).execute(events);
}

}  // namespace sdnlab
