#include "sdnlab/harness.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "sdnlab/error.hpp"

namespace sdnlab {

using nlohmann::json;

namespace {

constexpr std::string_view kEventsMagic = "# sdnlab events v1";
constexpr std::string_view kScenarioTag = "# scenario: ";

/// Doubles go through the shortest round-trip form so logs are stable.
json num(double v) { return json::parse(format_double(v)); }

const Slice* slice_of(const Scenario& s, std::string_view host) {
  for (const auto& sl : s.slices) {
    if (sl.member(host) != nullptr) return &sl;
  }
  return nullptr;
}

std::vector<FlowSummary> summarize(const Topology& t, const RunResult& r) {
  std::map<std::string, FlowSummary> out;
  std::map<std::string, std::string> last_path;
  for (const auto& rec : r.series) {
    for (const auto& [id, rate] : rec.allocation) {
      auto& f = out[id];
      f.id = id;
      f.mean_rate_mbps += rate;
      f.final_rate_mbps = rate;
      ++f.active_epochs;
      const auto& p = rec.paths.at(id);
      auto [it, fresh] = last_path.try_emplace(id, p);
      if (!fresh && !it->second.empty() && !p.empty() && it->second != p) ++f.path_changes;
      if (!p.empty()) it->second = p;
    }
  }
  std::vector<FlowSummary> v;
  for (auto& [id, f] : out) {
    f.mean_rate_mbps /= f.active_epochs;
    if (auto it = r.flows.find(id); it != r.flows.end()) {
      f.src = it->second.src;
      f.dst = it->second.dst;
    }
    f.final_path = last_path[id];
    if (auto it = r.flows.find(id); it != r.flows.end() && it->second.path) {
      f.rtt_ms = flow_rtt_ms(t, *it->second.path);
    }
    v.push_back(std::move(f));
  }
  return v;
}

IsolationAudit audit(const Scenario& s, const RunResult& r, const SliceHypervisor& hv) {
  IsolationAudit a;
  a.applicable = true;
  for (const auto& tr : r.traces) {
    const auto& f = r.flows.at(tr.flow);
    const auto* own = slice_of(s, f.src);
    const std::string owner = own != nullptr ? own->id : std::string();
    for (const auto& hop : tr.trace.hops) {
      if (hop.cookie.rfind(owner + "/", 0) != 0) {
        ++a.foreign_rule_hits;
        a.details.push_back("epoch " + std::to_string(tr.epoch) + " flow " + tr.flow + " matched '" + hop.cookie +
                            "' at " + hop.switch_id);
      }
    }
    if (tr.trace.terminal != TraceTerminal::Delivered) continue;
    const auto* at = slice_of(s, tr.trace.where);
    if (at == nullptr || at->id != owner) {
      ++a.cross_slice_deliveries;
      a.details.push_back("epoch " + std::to_string(tr.epoch) + " flow " + tr.flow + " of '" + owner +
                          "' delivered to " + tr.trace.where);
    }
    HeaderTuple got = tr.trace.final_header;
    HeaderTuple want = f.header;
    got.in_port = want.in_port = 0;
    if (got != want) {
      ++a.roundtrip_failures;
      a.details.push_back("epoch " + std::to_string(tr.epoch) + " flow " + tr.flow + " arrived as " + got.str());
    }
  }
  for (const auto& d : hv.deliveries()) {
    if (d.flow.empty()) continue;
    auto it = r.flows.find(d.flow);
    const auto* truth = it == r.flows.end() ? nullptr : slice_of(s, it->second.src);
    if (truth == nullptr || truth->id != d.slice) {
      ++a.cross_slice_events;
      a.details.push_back("epoch " + std::to_string(d.epoch) + " slice '" + d.slice + "' received " + d.line);
    }
  }
  a.rejected_directives = hv.violations().size();
  for (const auto& v : hv.violations()) a.details.push_back("rejected: " + v);
  return a;
}

std::vector<ExpectationResult> check_expectations(const Scenario& s, const RunResult& r) {
  std::vector<ExpectationResult> out;
  for (const auto& x : s.expectations) {
    const int epoch = x.epoch.value_or(static_cast<int>(r.series.size()) - 1);
    const auto& alloc = r.series.at(static_cast<std::size_t>(epoch)).allocation;
    ExpectationResult res;
    std::string names;
    bool known = true;
    for (const auto& f : x.flows) {
      names += (names.empty() ? "" : "+") + f;
      if (auto it = alloc.find(f); it != alloc.end()) res.actual += it->second;
      known = known && r.flows.count(f) != 0;
    }
    res.label = names + "@" + std::to_string(epoch);
    res.expected = x.rate_mbps;
    res.tolerance = std::max(x.abs_tol, x.rel_tol * std::fabs(x.rate_mbps));
    res.pass = known && std::fabs(res.actual - res.expected) <= res.tolerance;
    if (!known) res.label += " (unknown flow)";
    out.push_back(std::move(res));
  }
  return out;
}

std::string lines(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& l : v) out += l + "\n";
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

json apply_overrides(json doc, const RunOverrides& o) {
  detail::require_object(doc, "scenario");
  if (o.controller) doc["controller"] = *o.controller;
  if (o.epochs) doc["epochs"] = *o.epochs;
  if (o.seed) doc["seed"] = *o.seed;
  for (const auto& [m, c] : o.declarations) add_declaration(doc, m, c);
  if (o.disabled_proxies) doc["disabled_proxies"] = *o.disabled_proxies;
  return doc;
}

Report run_scenario(const Scenario& s) {
  auto controller = make_root_controller(s);
  RunOptions opts;
  opts.epochs = s.epochs;
  Report rep;
  rep.scenario = s.name;
  rep.controller = s.slices.empty() ? s.controller : "hypervisor";
  rep.epochs = s.epochs;
  rep.seed = s.seed;
  rep.document = s.document;
  rep.run = run(*s.topo, s.events, *controller, opts);
  rep.flows = summarize(*s.topo, rep.run);
  for (const auto& f : rep.flows) rep.aggregate_mean_mbps += f.mean_rate_mbps;
  for (const auto& t : rep.run.traces) rep.trace_divergences += t.follows_path ? 0 : 1;
  if (const auto* hv = dynamic_cast<const SliceHypervisor*>(controller.get())) rep.isolation = audit(s, rep.run, *hv);
  rep.expectations = check_expectations(s, rep.run);
  return rep;
}

bool Report::passed() const {
  if (trace_divergences != 0) return false;
  if (isolation.applicable && !isolation.clean()) return false;
  for (const auto& e : expectations) {
    if (!e.pass) return false;
  }
  return true;
}

std::string Report::metrics_csv() const {
  std::string out = "epoch,flow_id,rate_mbps,path\n";
  for (const auto& rec : run.series) {
    for (const auto& [id, rate] : rec.allocation) {
      out += std::to_string(rec.epoch) + "," + id + "," + format_double(rate) + "," + rec.paths.at(id) + "\n";
    }
  }
  return out;
}

json Report::metrics_json() const {
  json epochs_j = json::array();
  for (const auto& rec : run.series) {
    json flows_j = json::array();
    for (const auto& [id, rate] : rec.allocation) {
      flows_j.push_back(json{{"id", id}, {"rate_mbps", num(rate)}, {"path", rec.paths.at(id)}});
    }
    epochs_j.push_back(json{{"epoch", rec.epoch}, {"flows", std::move(flows_j)}});
  }
  return json{{"scenario", scenario}, {"controller", controller}, {"epochs", std::move(epochs_j)}};
}

std::string Report::events_log() const {
  std::string out(kEventsMagic);
  out += "\n# version: " + std::string(kVersion) + "\n# controller: " + controller + "\n";
  out += std::string(kScenarioTag) + document.dump() + "\n";
  return out + lines(run.event_log);
}

std::string Report::directives_log() const { return lines(run.directive_log); }

json Report::report_json() const {
  json flows_j = json::array();
  for (const auto& f : flows) {
    flows_j.push_back(json{{"id", f.id},
                           {"src", f.src},
                           {"dst", f.dst},
                           {"mean_rate_mbps", num(f.mean_rate_mbps)},
                           {"final_rate_mbps", num(f.final_rate_mbps)},
                           {"rtt_ms", num(f.rtt_ms)},
                           {"path_changes", f.path_changes},
                           {"active_epochs", f.active_epochs},
                           {"final_path", f.final_path}});
  }
  json exp_j = json::array();
  for (const auto& e : expectations) {
    exp_j.push_back(json{{"label", e.label},
                         {"expected", num(e.expected)},
                         {"actual", num(e.actual)},
                         {"tolerance", num(e.tolerance)},
                         {"pass", e.pass}});
  }
  json out{{"scenario", scenario},
           {"controller", controller},
           {"version", std::string(kVersion)},
           {"epochs", epochs},
           {"seed", seed},
           {"passed", passed()},
           {"aggregate_mean_mbps", num(aggregate_mean_mbps)},
           {"trace_divergences", trace_divergences},
           {"flows", std::move(flows_j)},
           {"expectations", std::move(exp_j)}};
  if (isolation.applicable) {
    out["isolation"] = json{{"cross_slice_deliveries", isolation.cross_slice_deliveries},
                            {"cross_slice_events", isolation.cross_slice_events},
                            {"roundtrip_failures", isolation.roundtrip_failures},
                            {"foreign_rule_hits", isolation.foreign_rule_hits},
                            {"rejected_directives", isolation.rejected_directives},
                            {"clean", isolation.clean()},
                            {"details", isolation.details}};
  }
  return out;
}

void Report::write(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  // Render everything first so a formatting failure leaves no files behind.
  const std::vector<std::pair<std::string, std::string>> files{
      {"metrics.csv", metrics_csv()},
      {"metrics.json", metrics_json().dump(2) + "\n"},
      {"events.log", events_log()},
      {"directives.log", directives_log()},
      {"report.json", report_json().dump(2) + "\n"},
  };
  for (const auto& [name, text] : files) write_text_file_atomic(dir / name, text);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(ErrorKind::Io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

json compare_reports(const json& a, const json& b) {
  auto rates = [](const json& r, const char* which) {
    std::map<std::string, double> out;
    if (!r.is_object() || !r.contains("flows") || !r.at("flows").is_array()) {
      throw Error(ErrorKind::Validation, std::string(which) + ": not a run report");
    }
    for (const auto& f : r.at("flows")) {
      if (!f.contains("id") || !f.contains("mean_rate_mbps")) throw Error(ErrorKind::Validation, std::string(which) + ": malformed flow entry");
      out[f.at("id").get<std::string>()] = f.at("mean_rate_mbps").get<double>();
    }
    return out;
  };
  const auto ra = rates(a, "first report");
  const auto rb = rates(b, "second report");
  std::vector<std::string> only_a, only_b;
  for (const auto& [id, v] : ra) {
    if (!rb.count(id)) only_a.push_back(id);
  }
  for (const auto& [id, v] : rb) {
    if (!ra.count(id)) only_b.push_back(id);
  }
  if (!only_a.empty() || !only_b.empty()) {
    std::string msg = "flow sets differ";
    if (!only_a.empty()) msg += "; only in first: " + json(only_a).dump();
    if (!only_b.empty()) msg += "; only in second: " + json(only_b).dump();
    throw Error(ErrorKind::Incomparable, msg);
  }
  json flows_j = json::array();
  double sum_a = 0, sum_b = 0;
  int better = 0, worse = 0, same = 0;
  for (const auto& [id, va] : ra) {
    const double vb = rb.at(id);
    const double d = va - vb;
    sum_a += va;
    sum_b += vb;
    (d > 0 ? better : d < 0 ? worse : same)++;
    flows_j.push_back(json{{"id", id}, {"a_mbps", num(va)}, {"b_mbps", num(vb)}, {"delta_mbps", num(d)}});
  }
  return json{{"a", a.value("controller", "")},
              {"b", b.value("controller", "")},
              {"flows", std::move(flows_j)},
              {"aggregate", json{{"a_mbps", num(sum_a)}, {"b_mbps", num(sum_b)}, {"delta_mbps", num(sum_a - sum_b)}}},
              {"summary", json{{"a_higher", better}, {"b_higher", worse}, {"equal", same}}}};
}

json compare_report_files(const std::filesystem::path& a, const std::filesystem::path& b) {
  auto load = [](std::filesystem::path p) {
    if (std::filesystem::is_directory(p)) p /= "report.json";
    return detail::parse_json(read_text_file(p), p.string());
  };
  return compare_reports(load(a), load(b));
}

ReplayResult replay(std::string_view events_log, std::string_view directives_log) {
  auto ev = split_lines(events_log);
  if (ev.empty() || ev.front() != kEventsMagic) throw Error(ErrorKind::Replay, "not an sdnlab event log");
  std::optional<json> doc;
  std::size_t i = 1;
  for (; i < ev.size() && !ev[i].empty() && ev[i][0] == '#'; ++i) {
    if (ev[i].rfind(kScenarioTag, 0) == 0) doc = detail::parse_json(ev[i].substr(kScenarioTag.size()), "event log scenario");
  }
  if (!doc) throw Error(ErrorKind::Replay, "event log carries no scenario header");
  const Scenario s = load_scenario(*doc);
  auto controller = make_root_controller(s);

  std::vector<std::string> produced;
  ReplayResult res;
  for (; i < ev.size(); ++i) {
    if (ev[i].empty()) continue;
    ControllerEvent e;
    try {
      e = parse_event_line(ev[i]);
    } catch (const Error& err) {
      throw Error(ErrorKind::Replay, "event line " + std::to_string(i + 1) + ": " + err.what());
    }
    ++res.events;
    for (const auto& d : controller->handle_event(e)) produced.push_back(std::to_string(e.epoch) + " " + to_line(d));
  }
  std::vector<std::string> recorded;
  for (auto& l : split_lines(directives_log)) {
    if (!l.empty()) recorded.push_back(std::move(l));
  }
  res.directives = produced.size();
  const std::size_t n = std::max(produced.size(), recorded.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::string want = k < recorded.size() ? recorded[k] : "<end of log>";
    const std::string got = k < produced.size() ? produced[k] : "<end of log>";
    if (want != got) {
      res.first_difference = k + 1;
      res.expected = want;
      res.actual = got;
      return res;
    }
  }
  res.identical = true;
  return res;
}

ReplayResult replay_file(const std::filesystem::path& path) {
  auto events = std::filesystem::is_directory(path) ? path / "events.log" : path;
  auto directives = events.parent_path() / "directives.log";
  return replay(read_text_file(events), read_text_file(directives));
}

}  // namespace sdnlab
