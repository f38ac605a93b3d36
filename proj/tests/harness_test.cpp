#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sdnlab/error.hpp"
#include "sdnlab/harness.hpp"
#include "support.hpp"

using namespace sdnlab;
namespace fs = std::filesystem;

namespace {

fs::path scenario(const std::string& name) { return testsupport::scenario_dir() / (name + ".json"); }

Error load_error(const std::string& text) {
  try {
    load_scenario(std::string_view(text));
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "accepted: " << text;
  return Error(ErrorKind::Io, "");
}

const char* kTiny = R"({
  "name": "tiny",
  "epochs": 4,
  "nodes": [
    {"id": "A", "kind": "switch", "domain": "d"},
    {"id": "B", "kind": "switch", "domain": "d"},
    {"id": "h1", "kind": "host", "domain": "d"},
    {"id": "h2", "kind": "host", "domain": "d"}
  ],
  "links": [
    {"id": "ab", "a": "A", "b": "B", "capacity_mbps": 1000, "latency_ms": 10, "kind": "direct_l2"},
    {"id": "x1", "a": "h1", "b": "A", "capacity_mbps": 10000, "latency_ms": 0, "kind": "direct_l2"},
    {"id": "x2", "a": "h2", "b": "B", "capacity_mbps": 10000, "latency_ms": 0, "kind": "direct_l2"}
  ],
  "events": [
    {"kind": "flow_start", "at": 0, "flow": {"id": "f", "src": "h1", "dst": "h2", "tp_dst": 80}},
    {"kind": "flow_start", "at": 2, "flow": {"id": "g", "src": "h1", "dst": "h2", "tp_dst": 81}}
  ],
  "expect": [{"flow": "f", "epoch": 1, "rate_mbps": 940}]
})";

nlohmann::json tiny() { return nlohmann::json::parse(kTiny); }

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("sdnlab-harness-" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(ScenarioLoad, ValidationNamesTheLocation) {
  auto doc = tiny();
  doc["events"][1]["flow"]["dst"] = "nowhere";
  auto e = load_error(doc.dump());
  EXPECT_EQ(e.kind(), ErrorKind::Validation);
  EXPECT_NE(std::string(e.what()).find("events[1]"), std::string::npos) << e.what();

  doc = tiny();
  doc["colour"] = "red";
  EXPECT_NE(std::string(load_error(doc.dump()).what()).find("colour"), std::string::npos);

  doc = tiny();
  doc["controller"] = "magic";
  EXPECT_EQ(load_error(doc.dump()).kind(), ErrorKind::Validation);

  doc = tiny();
  doc["events"][0]["at"] = 99;
  EXPECT_EQ(load_error(doc.dump()).kind(), ErrorKind::Validation);

  doc = tiny();
  doc["events"][0]["flow"]["tp_src"] = 1000;
  doc["events"][1]["flow"]["tp_src"] = 1000;
  doc["events"][1]["flow"]["tp_dst"] = 80;  // same five-tuple as f
  EXPECT_EQ(load_error(doc.dump()).kind(), ErrorKind::Validation);

  doc = tiny();
  doc.erase("name");
  EXPECT_EQ(load_error(doc.dump()).kind(), ErrorKind::Validation);

  auto p = load_error("{\n \"name\": \"x\",\n \"nodes\": [}\n");
  EXPECT_EQ(p.kind(), ErrorKind::Parse);
  EXPECT_NE(std::string(p.what()).find(":3:"), std::string::npos) << p.what();
}

TEST(ScenarioLoad, StopsAreChecked) {
  auto doc = tiny();
  doc["events"].push_back({{"kind", "flow_stop"}, {"at", 0}, {"flow", "g"}});
  EXPECT_EQ(load_error(doc.dump()).kind(), ErrorKind::Validation);
  doc = tiny();
  doc["events"].push_back({{"kind", "flow_stop"}, {"at", 3}, {"flow", "g"}});
  doc["events"].push_back({{"kind", "flow_stop"}, {"at", 3}, {"flow", "g"}});
  EXPECT_EQ(load_error(doc.dump()).kind(), ErrorKind::Validation);
}

TEST(ScenarioLoad, TopologyReferenceIsInlined) {
  auto s = load_scenario_file(scenario("table1_calibration"));
  EXPECT_FALSE(s.document.contains("topology"));
  EXPECT_TRUE(s.document.contains("nodes"));
  EXPECT_TRUE(s.topo->has_node("NAIST"));
  // The normalized document loads on its own.
  EXPECT_EQ(load_scenario(s.document).events.size(), s.events.size());
}

TEST(ScenarioLoad, ShippedScenariosAllLoad) {
  for (const auto& entry : fs::directory_iterator(testsupport::scenario_dir())) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario_file(entry.path())) << entry.path();
  }
}

TEST(Overrides, RecordedDocumentReflectsTheRun) {
  RunOverrides o;
  o.controller = "overseer";
  o.epochs = 3;
  o.seed = 9;
  o.declarations = {{"tp_dst=80", "latency_oriented"}};
  auto doc = apply_overrides(tiny(), o);
  auto s = load_scenario(doc);
  EXPECT_EQ(s.controller, "overseer");
  EXPECT_EQ(s.epochs, 3);
  EXPECT_EQ(s.seed, 9u);
  auto r = run_scenario(s);
  EXPECT_EQ(r.report_json().at("controller"), "overseer");
  EXPECT_NE(r.events_log().find("\"controller\":\"overseer\""), std::string::npos);
  o.declarations = {{"tp_dst=80", "fast"}};
  EXPECT_THROW(load_scenario(apply_overrides(tiny(), o)), Error);
}

TEST(RunScenario, SummarizesFlowsAndExpectations) {
  auto r = run_scenario(load_scenario(std::string_view(kTiny)));
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.flows.size(), 2u);
  const auto& f = r.flows[0];
  EXPECT_EQ(f.id, "f");
  EXPECT_EQ(f.active_epochs, 4);
  EXPECT_DOUBLE_EQ(f.final_rate_mbps, 470);
  EXPECT_DOUBLE_EQ(f.mean_rate_mbps, (940.0 * 2 + 470 * 2) / 4);
  EXPECT_DOUBLE_EQ(f.rtt_ms, 20);
  EXPECT_EQ(f.final_path, "x1;ab;x2");
  EXPECT_EQ(r.trace_divergences, 0u);
  EXPECT_FALSE(r.isolation.applicable);
  ASSERT_EQ(r.expectations.size(), 1u);
  EXPECT_TRUE(r.expectations[0].pass);
  // metrics.csv: header plus one row per (epoch, active flow).
  auto csv = r.metrics_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,flow_id,rate_mbps,path");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 + 2 * 2);
}

TEST(RunScenario, FailedExpectationFailsTheRun) {
  auto doc = tiny();
  doc["expect"][0]["rate_mbps"] = 941;
  auto r = run_scenario(load_scenario(doc));
  EXPECT_FALSE(r.passed());
}

TEST(Report, WritesAllFiles) {
  auto r = run_scenario(load_scenario(std::string_view(kTiny)));
  auto dir = fresh_dir("write");
  r.write(dir);
  for (const auto* f : {"metrics.csv", "metrics.json", "events.log", "directives.log", "report.json"}) {
    EXPECT_TRUE(fs::is_regular_file(dir / f)) << f;
  }
  EXPECT_EQ(read_text_file(dir / "metrics.csv"), r.metrics_csv());
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Report, FailedWriteLeavesNoPartialFile) {
  auto r = run_scenario(load_scenario(std::string_view(kTiny)));
  auto dir = fresh_dir("blocked");
  fs::create_directories(dir / "report.json" / "occupied");
  try {
    r.write(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    EXPECT_NE(e.path().extension(), ".tmp") << e.path();
    if (e.is_regular_file()) {
      const auto name = e.path().filename().string();
      // Whatever did land is complete.
      if (name == "metrics.csv") EXPECT_EQ(read_text_file(e.path()), r.metrics_csv());
    }
  }
}

TEST(Compare, SelfIsZeroAndStripingGains) {
  auto striped = run_scenario(load_scenario_file(scenario("gridftp_4path")));
  RunOverrides o;
  o.controller = "baseline";
  auto base = run_scenario(load_scenario(apply_overrides(striped.document, o)));
  auto self = compare_reports(striped.report_json(), striped.report_json());
  for (const auto& f : self.at("flows")) EXPECT_EQ(f.at("delta_mbps").get<double>(), 0.0);
  EXPECT_EQ(self.at("summary").at("equal"), 4);
  auto c = compare_reports(striped.report_json(), base.report_json());
  EXPECT_NEAR(c.at("aggregate").at("delta_mbps").get<double>(), 1000 - 250, 1e-9);
  EXPECT_EQ(c.at("summary").at("a_higher"), 4);
  EXPECT_EQ(c.at("a"), "gridftp");
  EXPECT_EQ(c.at("b"), "baseline");
}

TEST(Compare, DifferentFlowSetsAreIncomparable) {
  auto a = run_scenario(load_scenario(std::string_view(kTiny)));
  auto doc = tiny();
  doc["events"].erase(1);
  auto b = run_scenario(load_scenario(doc));
  try {
    compare_reports(a.report_json(), b.report_json());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Incomparable);
    EXPECT_NE(std::string(e.what()).find("\"g\""), std::string::npos);
  }
  EXPECT_THROW(compare_reports(nlohmann::json::object(), a.report_json()), Error);
}

TEST(Replay, RecordedRunReplaysIdentically) {
  for (const auto* name : {"gre_failover", "two_slice_isolation", "overseer_asymmetric"}) {
    auto r = run_scenario(load_scenario_file(scenario(name)));
    auto res = replay(r.events_log(), r.directives_log());
    EXPECT_TRUE(res.identical) << name << " line " << res.first_difference.value_or(0) << "\n  " << res.expected
                               << "\n  " << res.actual;
    EXPECT_EQ(res.directives, r.run.directive_log.size());
  }
}

TEST(Replay, EditedLogReportsFirstDifference) {
  auto r = run_scenario(load_scenario(std::string_view(kTiny)));
  auto directives = r.directives_log();
  // Corrupt the second directive line.
  auto first_nl = directives.find('\n');
  auto second_nl = directives.find('\n', first_nl + 1);
  directives.replace(first_nl + 1, second_nl - first_nl - 1, "0 remove sw=A cookie=bogus");
  auto res = replay(r.events_log(), directives);
  EXPECT_FALSE(res.identical);
  EXPECT_EQ(res.first_difference, 2u);
  EXPECT_EQ(res.expected, "0 remove sw=A cookie=bogus");

  auto truncated = r.directives_log();
  truncated.resize(first_nl + 1);
  auto short_res = replay(r.events_log(), truncated);
  EXPECT_EQ(short_res.first_difference, 2u);
  EXPECT_EQ(short_res.expected, "<end of log>");

  EXPECT_THROW(replay("garbage\n", ""), Error);
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
  for (const auto& entry : fs::directory_iterator(testsupport::scenario_dir())) {
    if (entry.path().extension() != ".json") continue;
    auto s = load_scenario_file(entry.path());
    auto a = run_scenario(s);
    auto b = run_scenario(s);
    EXPECT_EQ(a.metrics_csv(), b.metrics_csv()) << entry.path();
    EXPECT_EQ(a.events_log(), b.events_log()) << entry.path();
    EXPECT_EQ(a.directives_log(), b.directives_log()) << entry.path();
    EXPECT_EQ(a.report_json().dump(), b.report_json().dump()) << entry.path();
  }
}

TEST(Determinism, SeedChangesRandomTraffic) {
  auto s = load_scenario_file(scenario("two_slice_isolation"));
  RunOverrides o;
  o.seed = s.seed + 1;
  auto other = load_scenario(apply_overrides(s.document, o));
  EXPECT_NE(run_scenario(s).metrics_csv(), run_scenario(other).metrics_csv());
}
