#include <gtest/gtest.h>

#include "sdnlab/error.hpp"
#include "sdnlab/harness.hpp"
#include "sdnlab/multipath.hpp"
#include "sdnlab/scenario.hpp"
#include "support.hpp"

using namespace sdnlab;
using testsupport::make_host;
using testsupport::make_link;
using testsupport::make_switch;

namespace {

Topology scenario_topo(const std::string& name) {
  return *load_scenario_file(testsupport::scenario_dir() / (name + ".json")).topo;
}

TransferRequest request(const std::string& src, const std::string& dst, int streams, int paths) {
  return TransferRequest{"x", src, dst, streams, paths};
}

HeaderTuple mp_header(std::uint16_t tp_src, std::uint8_t opts) {
  HeaderTuple h;
  h.ip_src = Ipv4::parse("10.0.0.1");
  h.ip_dst = Ipv4::parse("10.0.0.2");
  h.tp_src = tp_src;
  h.tp_dst = 5001;
  h.tcp_options = opts;
  return h;
}

// hs - A - B - hd directly, and A - C - B.
Topology triangle() {
  return Topology({make_host("hs"), make_host("hd"), make_switch("A"), make_switch("B"), make_switch("C")},
                  {make_link("xs", "hs", "A", 10000, 0), make_link("xd", "hd", "B", 10000, 0),
                   make_link("ab", "A", "B", 100, 50), make_link("ac", "A", "C", 100, 1), make_link("cb", "C", "B", 100, 1)});
}

}  // namespace

TEST(RequestPaths, GrantsAtMostTheDisjointCount) {
  auto t = scenario_topo("gridftp_4path");
  EXPECT_EQ(request_paths(t, request("S", "D", 4, 4)).size(), 4u);
  EXPECT_EQ(request_paths(t, request("S", "D", 4, 8)).size(), 4u);
  auto two = request_paths(t, request("S", "D", 4, 2));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].str(), "acc-s;b1-in;b1-out;acc-d");
  EXPECT_EQ(two[1].str(), "acc-s;b2-in;b2-out;acc-d");
  EXPECT_THROW(request_paths(t, request("S", "D", 0, 2)), Error);
}

TEST(RequestPaths, BackboneSwitches) {
  auto t = load_topology(read_text_file(testsupport::scenario_dir() / "pragma-ent.topo"));
  EXPECT_EQ(request_paths(t, request("NAIST", "UF", 4, 4)).size(), 4u);
  // Between hosts only the access links are shared.
  auto hosts = request_paths(t, request("dtn-naist", "dtn-uf", 4, 4));
  EXPECT_EQ(hosts.size(), 4u);
  std::map<std::string, int> uses;
  for (const auto& p : hosts) {
    for (const auto& h : p.hops) ++uses[h];
  }
  for (const auto& [link, n] : uses) {
    if (link.rfind("acc-", 0) != 0) EXPECT_EQ(n, 1) << link;
  }
}

TEST(RequestPaths, NoPathIsAnError) {
  Topology t({make_host("a"), make_host("b"), make_switch("s")}, {make_link("l", "a", "s", 1, 1)});
  EXPECT_THROW(request_paths(t, request("a", "b", 1, 1)), Error);
}

TEST(AssignStream, RoundRobin) {
  StripedTransfer st;
  st.request = request("S", "D", 6, 4);
  for (int i = 0; i < 4; ++i) st.paths.push_back(Path{"S", "D", {"p" + std::to_string(i)}});
  std::vector<int> count(4, 0);
  for (int s = 0; s < 6; ++s) ++count[static_cast<std::size_t>(std::stoi(assign_stream(st, s).hops[0].substr(1)))];
  EXPECT_EQ(count, (std::vector<int>{2, 2, 1, 1}));
  EXPECT_THROW(assign_stream(st, -1), Error);
  st.paths.clear();
  EXPECT_THROW(assign_stream(st, 0), Error);
}

// Property: ranking agrees with an independent sort over hop count, latency, ids.
TEST(RankPathSet, MatchesSortOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    std::mt19937_64 rng(seed);
    auto t = testsupport::random_topology(rng, 5, 4);
    auto all = testsupport::all_simple_paths(t, "h0", "h1");
    std::shuffle(all.begin(), all.end(), rng);
    auto want = all;
    testsupport::sort_paths(t, want, PathMetric::Hops);
    rank_path_set(t, all);
    EXPECT_EQ(all, want) << "seed " << seed;
  }
}

TEST(PathSetRegistry, TriangleDirectThenDetour) {
  auto t = triangle();
  PathSetRegistry reg;
  auto& e = reg.on_mp_capable(t, mp_header(1, kMpCapable), "hs", "hd");
  ASSERT_EQ(e.set.paths.size(), 2u);
  EXPECT_EQ(e.instance.subflows.front().second.str(), "xs;ab;xd");
  EXPECT_EQ(reg.on_mp_join(mp_header(2, kMpJoin)).str(), "xs;ac;cb;xd");
}

TEST(PathSetRegistry, EqualHopsOrderedByLatency) {
  auto t = scenario_topo("mptcp_3path");
  PathSetRegistry reg;
  reg.on_mp_capable(t, mp_header(1, kMpCapable), "S", "D");
  const auto& set = reg.entries().front().set.paths;
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[0].hops[1], "p1-in");
  EXPECT_EQ(set[1].hops[1], "p2-in");
  EXPECT_EQ(set[2].hops[1], "p3-in");
}

TEST(PathSetRegistry, DuplicateCapableJoinWrapAndUnknownJoin) {
  auto t = scenario_topo("mptcp_3path");
  PathSetRegistry reg;
  reg.on_mp_capable(t, mp_header(1, kMpCapable), "S", "D");
  reg.on_mp_capable(t, mp_header(1, kMpCapable), "S", "D");
  EXPECT_EQ(reg.entries().size(), 1u);
  const auto& set = reg.entries().front().set.paths;
  EXPECT_EQ(reg.on_mp_join(mp_header(2, kMpJoin)), set[1]);
  EXPECT_EQ(reg.on_mp_join(mp_header(3, kMpJoin)), set[2]);
  EXPECT_EQ(reg.on_mp_join(mp_header(4, kMpJoin)), set[0]);
  EXPECT_EQ(reg.on_mp_join(mp_header(5, kMpJoin)), set[1]);
  // A repeated join keeps its path.
  EXPECT_EQ(reg.on_mp_join(mp_header(3, kMpJoin)), set[2]);
  auto stranger = mp_header(9, kMpJoin);
  stranger.tp_dst = 80;
  try {
    reg.on_mp_join(stranger);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownEntity);
  }
  EXPECT_THROW(reg.on_mp_capable(t, mp_header(1, 0), "S", "D"), Error);
}

TEST(GridFtp, StreamsFollowGrantedPaths) {
  auto t = scenario_topo("gridftp_4path");
  GridFtpController c(t, AddressBook::from_topology(t));
  c.handle_event({0, TransferRequest{"x", "S", "D", 4, 4}});
  ASSERT_EQ(c.transfers().at("x").paths.size(), 4u);
  std::set<std::string> seen;
  for (int s = 0; s < 5; ++s) {
    HeaderTuple h;
    h.ip_src = t.node("S").ip;
    h.ip_dst = t.node("D").ip;
    h.tp_src = static_cast<std::uint16_t>(40000 + s);
    h.tp_dst = 50000;
    auto ds = c.handle_event({0, PacketIn{"ES", 1, h, "x/s" + std::to_string(s)}});
    seen.insert(std::get<RouteFlowDirective>(ds.back()).path.str());
  }
  // The fifth stream exceeds the request and falls back to hop-shortest.
  EXPECT_EQ(seen.size(), 4u);
}

// Property: striping over the granted paths never loses to a single path.
TEST(GridFtp, StripedAtLeastSingleOnRandomTopologies) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed * 31);
    auto t = testsupport::random_topology(rng, 6, 6);
    const int n = static_cast<int>(testsupport::pick(rng, 1, 6));
    StripedTransfer st{request("h0", "h1", n, 4), {}, 0};
    st.paths = request_paths(t, st.request);
    const auto single = k_shortest_paths(t, "h0", "h1", 1, PathMetric::Hops).front();
    EXPECT_EQ(st.paths.front(), single);
    std::vector<TrafficFlow> striped, one;
    for (int s = 0; s < n; ++s) {
      TrafficFlow f;
      f.id = "s" + std::to_string(s);
      f.src = "h0";
      f.dst = "h1";
      f.path = assign_stream(st, s);
      striped.push_back(f);
      f.path = single;
      one.push_back(f);
    }
    double a = 0, b = 0;
    for (const auto& [id, r] : allocate_max_min(t, striped)) a += r;
    for (const auto& [id, r] : allocate_max_min(t, one)) b += r;
    EXPECT_GE(a, b - 1e-9) << "seed " << seed;
  }
}
