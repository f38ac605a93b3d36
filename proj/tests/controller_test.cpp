#include <gtest/gtest.h>

#include "sdnlab/controller.hpp"
#include "sdnlab/error.hpp"
#include "sdnlab/simulator.hpp"
#include "support.hpp"

using namespace sdnlab;
using testsupport::make_host;
using testsupport::make_link;
using testsupport::make_switch;

namespace {

// hs - A - B - hd with a backup A - C - B detour.
Topology diamond() {
  return Topology({make_switch("A"), make_switch("B"), make_switch("C"), make_host("hs"), make_host("hd")},
                  {make_link("ab", "A", "B", 1000, 10, 0.94), make_link("ac", "A", "C", 650, 20),
                   make_link("cb", "C", "B", 650, 20), make_link("xs", "hs", "A", 10000, 0),
                   make_link("xd", "hd", "B", 10000, 0)});
}

HeaderTuple header_between(const Topology& t, const std::string& s, const std::string& d, std::uint16_t tp_dst) {
  HeaderTuple h;
  h.ip_src = t.node(s).ip;
  h.ip_dst = t.node(d).ip;
  h.eth_src = t.node(s).mac;
  h.eth_dst = t.node(d).mac;
  h.tp_src = 40000;
  h.tp_dst = tp_dst;
  return h;
}

SimEvent start(int at, const Topology& t, const std::string& id, std::uint16_t tp_dst, std::optional<double> cap = {}) {
  TrafficFlow f;
  f.id = id;
  f.src = "hs";
  f.dst = "hd";
  f.header = header_between(t, "hs", "hd", tp_dst);
  f.per_stream_cap_mbps = cap;
  return SimEvent{at, SimEventKind::FlowStart, id, f, std::nullopt};
}

SimEvent link_event(int at, SimEventKind k, const std::string& link) { return SimEvent{at, k, link, std::nullopt, std::nullopt}; }

}  // namespace

TEST(EventLines, RoundTripEveryKind) {
  HeaderTuple h;
  h.ip_src = Ipv4::parse("10.0.0.1");
  h.ip_dst = Ipv4::parse("10.0.0.2");
  h.tp_dst = 5001;
  h.tcp_options = kMpCapable;
  MatchPattern m;
  m.tp_dst = 22;
  const std::vector<ControllerEvent> events{
      {0, PacketIn{"A", 3, h, "f1"}},
      {1, LinkStats{"ab", 123.25, 816.75, 20}},
      {2, FlowStats{"f1", 0.1}},
      {3, FlowEnded{"f1"}},
      {4, EpochTick{4}},
      {5, PortStatus{"ab", false}},
      {6, AppDeclaration{m, FlowClass::LatencyOriented}},
      {7, TransferRequest{"x", "hs", "hd", 4, 4}},
  };
  for (const auto& e : events) {
    const auto line = to_line(e);
    EXPECT_EQ(to_line(parse_event_line(line)), line);
    EXPECT_EQ(parse_event_line(line).body.index(), e.body.index()) << line;
  }
}

TEST(DirectiveLines, RoundTripEveryKind) {
  FlowEntry e;
  e.priority = 100;
  e.match.ip_dst = Ipv4::parse("10.0.0.2");
  e.actions = {set_ip(Field::IpDst, Ipv4::parse("240.0.0.2")), OutputAction{2}};
  e.cookie = "f/x";
  const std::vector<Directive> ds{InstallDirective{"A", e}, RemoveDirective{"A", "f/x"},
                                  RouteFlowDirective{"x", Path{"hs", "hd", {"xs", "ab", "xd"}}}};
  for (const auto& d : ds) {
    const auto line = to_line(d);
    EXPECT_EQ(to_line(parse_directive_line(line)), line);
  }
  EXPECT_THROW(parse_directive_line("launch rockets"), Error);
  EXPECT_THROW(parse_event_line("packet_in sw=A"), Error);
}

TEST(InstallPath, OneEntryPerSwitch) {
  auto t = diamond();
  const Path p{"hs", "hd", {"xs", "ac", "cb", "xd"}};
  auto ds = install_path(t, p, MatchPattern::five_tuple(header_between(t, "hs", "hd", 80)), "root", "c");
  ASSERT_EQ(ds.size(), 3u);
  const auto& first = std::get<InstallDirective>(ds[0]);
  EXPECT_EQ(first.switch_id, "A");
  EXPECT_EQ(first.entry.output_port(), t.port_of("A", "ac"));
  EXPECT_EQ(std::get<InstallDirective>(ds[2]).entry.output_port(), t.port_of("B", "xd"));
  EXPECT_THROW(install_path(t, Path{"hs", "B", {"xs", "ab"}}, MatchPattern::all(), "root", "c"), Error);
}

TEST(Baseline, PacketInRoutesShortestAndIsIdempotent) {
  auto t = diamond();
  BaselineController c(t, AddressBook::from_topology(t));
  auto h = header_between(t, "hs", "hd", 80);
  auto ds = c.handle_event({0, PacketIn{"A", t.port_of("A", "xs"), h, "f"}});
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(std::get<RouteFlowDirective>(ds.back()).path.str(), "xs;ab;xd");
  EXPECT_TRUE(c.handle_event({0, PacketIn{"B", 1, h, "f"}}).empty());
  auto rm = c.handle_event({1, FlowEnded{"f"}});
  EXPECT_EQ(rm.size(), 2u);
  EXPECT_TRUE(c.routes().empty());
}

TEST(Baseline, UnknownAddressesAreIgnored) {
  auto t = diamond();
  BaselineController c(t, AddressBook::from_topology(t));
  auto h = header_between(t, "hs", "hd", 80);
  h.ip_dst = Ipv4::parse("192.168.1.1");
  EXPECT_TRUE(c.handle_event({0, PacketIn{"A", 4, h, "f"}}).empty());
}

TEST(Baseline, FailoverOnPortDown) {
  auto t = diamond();
  BaselineController c(t, AddressBook::from_topology(t));
  c.handle_event({0, PacketIn{"A", 4, header_between(t, "hs", "hd", 80), "f"}});
  auto ds = c.handle_event({2, PortStatus{"ab", false}});
  ASSERT_FALSE(ds.empty());
  EXPECT_TRUE(std::holds_alternative<RemoveDirective>(ds.front()));
  EXPECT_EQ(std::get<RouteFlowDirective>(ds.back()).path.str(), "xs;ac;cb;xd");
}

TEST(LinkMonitor, EwmaSmoothing) {
  LinkMonitor m(0.5);
  EXPECT_DOUBLE_EQ(m.smooth("l", 100), 100);
  EXPECT_DOUBLE_EQ(m.smooth("l", 0), 50);
  EXPECT_DOUBLE_EQ(m.smooth("l", 0), 25);
  LinkMonitor fast(1.0);
  fast.smooth("l", 100);
  EXPECT_DOUBLE_EQ(fast.smooth("l", 7), 7);
}

TEST(LinkMonitor, SkipsDownLinksAndReportsFlows) {
  auto t = diamond();
  TrafficFlow f;
  f.id = "f";
  f.src = "hs";
  f.dst = "hd";
  f.path = Path{"hs", "hd", {"xs", "ab", "xd"}};
  LinkMonitor m;
  auto samples = m.sample(t, std::vector<TrafficFlow>{f}, Allocation{{"f", 940}}, LinkSet{"cb"});
  ASSERT_EQ(samples.size(), 5u);
  const auto& ab = std::get<LinkStats>(samples[0]);
  EXPECT_EQ(ab.link, "ab");
  EXPECT_DOUBLE_EQ(ab.used_mbps, 940);
  EXPECT_NEAR(ab.residual_mbps, 0, 1e-9);
  EXPECT_DOUBLE_EQ(ab.rtt_ms, 20);
  EXPECT_EQ(std::get<FlowStats>(samples.back()).flow, "f");
}

TEST(Simulator, FailoverMovesTrafficToBackup) {
  auto t = diamond();
  BaselineController c(t, AddressBook::from_topology(t));
  RunOptions o;
  o.epochs = 6;
  auto r = run(t, {start(0, t, "f", 80), link_event(2, SimEventKind::LinkFail, "ab"), link_event(4, SimEventKind::LinkRestore, "ab")}, c, o);
  ASSERT_EQ(r.series.size(), 6u);
  EXPECT_NEAR(r.series[1].allocation.at("f"), 940, 1e-9);
  EXPECT_NEAR(r.series[2].allocation.at("f"), 650, 1e-9);
  EXPECT_EQ(r.series[2].paths.at("f"), "xs;ac;cb;xd");
  // Baseline does not move back on restore.
  EXPECT_NEAR(r.series[5].allocation.at("f"), 650, 1e-9);
  for (const auto& tr : r.traces) EXPECT_TRUE(tr.follows_path) << tr.flow << "@" << tr.epoch;
}

TEST(Simulator, StopRemovesRulesAndZeroesNothingElse) {
  auto t = diamond();
  BaselineController c(t, AddressBook::from_topology(t));
  RunOptions o;
  o.epochs = 4;
  auto r = run(t,
               {start(0, t, "a", 80), start(0, t, "b", 81),
                SimEvent{2, SimEventKind::FlowStop, "a", std::nullopt, std::nullopt}},
               c, o);
  EXPECT_NEAR(r.series[1].allocation.at("a"), 470, 1e-9);
  EXPECT_EQ(r.series[2].allocation.count("a"), 0u);
  EXPECT_NEAR(r.series[2].allocation.at("b"), 940, 1e-9);
  EXPECT_TRUE(c.routes().count("a") == 0);
}

TEST(Simulator, RejectsBadSchedules) {
  auto t = diamond();
  BaselineController c(t, AddressBook::from_topology(t));
  RunOptions o;
  o.epochs = 3;
  EXPECT_THROW(run(t, {start(2, t, "a", 80), start(1, t, "b", 80)}, c, o), Error);
  BaselineController c2(t, AddressBook::from_topology(t));
  EXPECT_THROW(run(t, {start(0, t, "a", 80), start(1, t, "a", 80)}, c2, o), Error);
}

namespace {

/// Installs a rule that outputs to a port that does not exist.
class BrokenController : public Controller {
 public:
  std::vector<Directive> handle_event(const ControllerEvent& e) override {
    if (!std::holds_alternative<PacketIn>(e.body)) return {};
    FlowEntry entry;
    entry.priority = 1;
    entry.match = MatchPattern::all();
    entry.actions = {OutputAction{1}, OutputAction{2}};
    entry.cookie = "bad";
    return {InstallDirective{"A", entry}};
  }
};

}  // namespace

TEST(Simulator, InvalidDirectiveIsDirectiveError) {
  auto t = diamond();
  BrokenController c;
  RunOptions o;
  o.epochs = 1;
  try {
    run(t, {start(0, t, "a", 80)}, c, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Directive);
  }
}

TEST(Simulator, RunsAreDeterministic) {
  auto t = diamond();
  auto once = [&] {
    BaselineController c(t, AddressBook::from_topology(t));
    RunOptions o;
    o.epochs = 8;
    return run(t, {start(0, t, "a", 80, 300), start(1, t, "b", 81), link_event(3, SimEventKind::LinkFail, "ab")}, c, o);
  };
  auto a = once();
  auto b = once();
  EXPECT_EQ(a.event_log, b.event_log);
  EXPECT_EQ(a.directive_log, b.directive_log);
}
