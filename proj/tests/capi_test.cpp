// Exercises the shared library through its C interface only.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "sdnlab/sdnlab.h"

namespace fs = std::filesystem;

namespace {

std::string scenario(const char* name) { return std::string(SDNLAB_SCENARIO_DIR) + "/" + name + ".json"; }

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  sdnlab_string_free(s);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("sdnlab-capi-" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(sdnlab_version(), "0.1.0");
  EXPECT_STREQ(sdnlab_status_name(SDNLAB_OK), "ok");
  EXPECT_STREQ(sdnlab_status_name(SDNLAB_ERR_ISOLATION), "isolation");
}

TEST(CApi, NullArgumentsAreRejected) {
  sdnlab_scenario* s = nullptr;
  EXPECT_EQ(sdnlab_scenario_load_file(nullptr, &s), SDNLAB_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(sdnlab_run(nullptr, nullptr, nullptr), SDNLAB_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(sdnlab_report_passed(nullptr), 0);
  sdnlab_scenario_free(nullptr);
  sdnlab_report_free(nullptr);
  sdnlab_string_free(nullptr);
}

TEST(CApi, ErrorsCarryStatusAndMessage) {
  sdnlab_scenario* s = nullptr;
  EXPECT_EQ(sdnlab_scenario_load_string("{oops", nullptr, &s), SDNLAB_ERR_PARSE);
  EXPECT_EQ(s, nullptr);
  EXPECT_GT(std::strlen(sdnlab_last_error()), 0u);
  EXPECT_EQ(sdnlab_scenario_load_string(R"({"name":"x","nodes":[],"links":[],"bogus":1})", nullptr, &s),
            SDNLAB_ERR_VALIDATION);
  EXPECT_NE(std::string(sdnlab_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(sdnlab_scenario_load_file("/nonexistent/x.json", &s), SDNLAB_ERR_IO);
}

TEST(CApi, RunWriteCompareReplay) {
  sdnlab_scenario* s = nullptr;
  ASSERT_EQ(sdnlab_scenario_load_file(scenario("gridftp_4path").c_str(), &s), SDNLAB_OK);
  char* summary = nullptr;
  ASSERT_EQ(sdnlab_scenario_summary(s, &summary), SDNLAB_OK);
  EXPECT_NE(take(summary).find("\"controller\":\"gridftp\""), std::string::npos);

  sdnlab_report* striped = nullptr;
  ASSERT_EQ(sdnlab_run(s, nullptr, &striped), SDNLAB_OK);
  EXPECT_EQ(sdnlab_report_passed(striped), 1);
  sdnlab_run_options opts{};
  opts.controller = "baseline";
  sdnlab_report* base = nullptr;
  ASSERT_EQ(sdnlab_run(s, &opts, &base), SDNLAB_OK);
  EXPECT_EQ(sdnlab_report_passed(base), 0);  // the 1000 Mbps expectation fails

  auto a = fresh_dir("a");
  auto b = fresh_dir("b");
  ASSERT_EQ(sdnlab_report_write(striped, a.c_str()), SDNLAB_OK);
  ASSERT_EQ(sdnlab_report_write(base, b.c_str()), SDNLAB_OK);
  char* cmp = nullptr;
  ASSERT_EQ(sdnlab_compare_files(a.c_str(), b.c_str(), &cmp), SDNLAB_OK);
  EXPECT_NE(take(cmp).find("\"a_higher\": 4"), std::string::npos);

  int identical = 0;
  char* rep = nullptr;
  ASSERT_EQ(sdnlab_replay_file(a.c_str(), &identical, &rep), SDNLAB_OK);
  take(rep);
  EXPECT_EQ(identical, 1);

  char* csv = nullptr;
  ASSERT_EQ(sdnlab_report_metrics_csv(striped, &csv), SDNLAB_OK);
  EXPECT_EQ(take(csv).rfind("epoch,flow_id,rate_mbps,path\n", 0), 0u);

  sdnlab_report_free(striped);
  sdnlab_report_free(base);
  sdnlab_scenario_free(s);
}

TEST(CApi, DeclarationsAndOverrides) {
  sdnlab_scenario* s = nullptr;
  ASSERT_EQ(sdnlab_scenario_load_file(scenario("overseer_asymmetric").c_str(), &s), SDNLAB_OK);
  EXPECT_EQ(sdnlab_scenario_add_declaration(s, "tp_dst=22", "warp"), SDNLAB_ERR_VALIDATION);
  ASSERT_EQ(sdnlab_scenario_add_declaration(s, "tp_dst=22", "bandwidth_intensive"), SDNLAB_OK);
  char* doc = nullptr;
  ASSERT_EQ(sdnlab_scenario_to_json(s, &doc), SDNLAB_OK);
  EXPECT_NE(take(doc).find("bandwidth_intensive"), std::string::npos);

  sdnlab_run_options bad{};
  bad.n_declarations = 1;
  sdnlab_report* r = nullptr;
  EXPECT_EQ(sdnlab_run(s, &bad, &r), SDNLAB_ERR_VALIDATION);
  EXPECT_EQ(r, nullptr);

  sdnlab_run_options unknown{};
  unknown.controller = "nope";
  EXPECT_EQ(sdnlab_run(s, &unknown, &r), SDNLAB_ERR_VALIDATION);

  sdnlab_run_options proxies{};
  const char* d[] = {"site-a"};
  proxies.override_disabled_proxies = 1;
  proxies.disabled_proxies = d;
  proxies.n_disabled_proxies = 1;
  EXPECT_EQ(sdnlab_run(s, &proxies, &r), SDNLAB_ERR_VALIDATION);  // no slices here
  sdnlab_scenario_free(s);
}

TEST(CApi, IncomparableReports) {
  sdnlab_scenario* x = nullptr;
  sdnlab_scenario* y = nullptr;
  ASSERT_EQ(sdnlab_scenario_load_file(scenario("gre_failover").c_str(), &x), SDNLAB_OK);
  ASSERT_EQ(sdnlab_scenario_load_file(scenario("mptcp_3path").c_str(), &y), SDNLAB_OK);
  sdnlab_report* rx = nullptr;
  sdnlab_report* ry = nullptr;
  ASSERT_EQ(sdnlab_run(x, nullptr, &rx), SDNLAB_OK);
  ASSERT_EQ(sdnlab_run(y, nullptr, &ry), SDNLAB_OK);
  auto a = fresh_dir("x");
  auto b = fresh_dir("y");
  ASSERT_EQ(sdnlab_report_write(rx, a.c_str()), SDNLAB_OK);
  ASSERT_EQ(sdnlab_report_write(ry, b.c_str()), SDNLAB_OK);
  char* out = nullptr;
  EXPECT_EQ(sdnlab_compare_files(a.c_str(), b.c_str(), &out), SDNLAB_ERR_INCOMPARABLE);
  sdnlab_report_free(rx);
  sdnlab_report_free(ry);
  sdnlab_scenario_free(x);
  sdnlab_scenario_free(y);
}
