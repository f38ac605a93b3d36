#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdnlab/scenario.hpp"

namespace sdnlab {

inline constexpr std::string_view kVersion = "0.1.0";

/// Command-line style adjustments applied to a scenario document before
/// it is loaded, so that the recorded document reflects what actually ran.
struct RunOverrides {
  std::optional<std::string> controller;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> declarations;  // (match, class)
  std::optional<std::vector<std::string>> disabled_proxies;
};

nlohmann::json apply_overrides(nlohmann::json doc, const RunOverrides& o);

struct FlowSummary {
  std::string id;
  std::string src;
  std::string dst;
  double mean_rate_mbps = 0;  // over the epochs the flow was active
  double final_rate_mbps = 0;
  double rtt_ms = 0;  // along the last path; 0 when never routed
  int path_changes = 0;
  int active_epochs = 0;
  std::string final_path;
};

/// Cross-slice leakage found in a sliced run. All counters are zero for a
/// correctly isolated run.
struct IsolationAudit {
  bool applicable = false;
  std::size_t cross_slice_deliveries = 0;  // packets reaching another slice's host
  std::size_t cross_slice_events = 0;      // tenant saw another slice's flow
  std::size_t roundtrip_failures = 0;      // header not restored at delivery
  std::size_t foreign_rule_hits = 0;       // packet matched another owner's entry
  std::size_t rejected_directives = 0;     // tenant directives refused by a proxy
  std::vector<std::string> details;

  bool clean() const {
    return cross_slice_deliveries == 0 && cross_slice_events == 0 && roundtrip_failures == 0 &&
           foreign_rule_hits == 0;
  }
};

struct ExpectationResult {
  std::string label;
  double expected = 0;
  double actual = 0;
  double tolerance = 0;
  bool pass = false;
};

struct Report {
  std::string scenario;
  std::string controller;
  int epochs = 0;
  std::uint64_t seed = 0;
  nlohmann::json document;
  RunResult run;
  std::vector<FlowSummary> flows;
  double aggregate_mean_mbps = 0;
  std::size_t trace_divergences = 0;  // data-plane walks that left the chosen path
  IsolationAudit isolation;
  std::vector<ExpectationResult> expectations;

  bool passed() const;

  std::string metrics_csv() const;
  nlohmann::json metrics_json() const;
  std::string events_log() const;
  std::string directives_log() const;
  nlohmann::json report_json() const;

  /// Writes metrics.csv, metrics.json, events.log, directives.log and
  /// report.json into `dir`. Each file appears whole or not at all.
  void write(const std::filesystem::path& dir) const;
};

Report run_scenario(const Scenario& s);

/// Pairwise deltas (a - b) of per-flow mean rates from two report.json
/// files (or output directories). Error(Incomparable) if the flow sets
/// differ.
nlohmann::json compare_reports(const nlohmann::json& a, const nlohmann::json& b);
nlohmann::json compare_report_files(const std::filesystem::path& a, const std::filesystem::path& b);

struct ReplayResult {
  bool identical = false;
  std::size_t events = 0;
  std::size_t directives = 0;
  std::optional<std::size_t> first_difference;  // 1-based directive line
  std::string expected;
  std::string actual;
};

/// Feeds a recorded event log to a freshly built controller and compares
/// the directives it issues against `directives_log` line by line.
ReplayResult replay(std::string_view events_log, std::string_view directives_log);
/// `path` is an output directory or its events.log; directives.log is read
/// from the same directory.
ReplayResult replay_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace sdnlab
