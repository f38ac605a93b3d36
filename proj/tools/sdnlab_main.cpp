// sdnlab command-line front end. Talks to the simulator through the C API.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdnlab/sdnlab.h"

namespace {

enum Exit { kOk = 0, kInput = 1, kAssertion = 2, kRuntime = 3 };

int exit_for(sdnlab_status s) {
  switch (s) {
    case SDNLAB_OK: return kOk;
    case SDNLAB_ERR_PARSE:
    case SDNLAB_ERR_VALIDATION:
    case SDNLAB_ERR_UNKNOWN_ENTITY:
    case SDNLAB_ERR_EXHAUSTED:
    case SDNLAB_ERR_INCOMPARABLE:
    case SDNLAB_ERR_INVALID_ARGUMENT: return kInput;
    case SDNLAB_ERR_ISOLATION: return kAssertion;
    default: return kRuntime;
  }
}

int fail(sdnlab_status s) {
  std::cerr << "sdnlab: " << sdnlab_status_name(s) << " error: " << sdnlab_last_error() << "\n";
  return exit_for(s);
}

struct CString {
  char* p = nullptr;
  ~CString() { sdnlab_string_free(p); }
};

struct ScenarioHandle {
  sdnlab_scenario* p = nullptr;
  ~ScenarioHandle() { sdnlab_scenario_free(p); }
};

struct ReportHandle {
  sdnlab_report* p = nullptr;
  ~ReportHandle() { sdnlab_report_free(p); }
};

/// "MATCH@CLASS" -> (match, class); the match itself contains '='.
bool split_declaration(const std::string& arg, std::string& match, std::string& cls) {
  auto at = arg.rfind('@');
  if (at == std::string::npos || at == 0 || at + 1 == arg.size()) return false;
  match = arg.substr(0, at);
  cls = arg.substr(at + 1);
  return true;
}

int cmd_run(const std::string& path, const std::string& controller, std::string out_dir, int epochs,
            const std::vector<std::uint64_t>& seed, const std::vector<std::string>& declares,
            const std::vector<std::string>& disabled, bool quiet) {
  ScenarioHandle sc;
  if (auto s = sdnlab_scenario_load_file(path.c_str(), &sc.p); s != SDNLAB_OK) return fail(s);

  std::vector<std::string> matches(declares.size()), classes(declares.size());
  std::vector<sdnlab_declaration> decls;
  for (std::size_t i = 0; i < declares.size(); ++i) {
    if (!split_declaration(declares[i], matches[i], classes[i])) {
      std::cerr << "sdnlab: --declare expects MATCH@CLASS, got '" << declares[i] << "'\n";
      return kInput;
    }
  }
  for (std::size_t i = 0; i < declares.size(); ++i) decls.push_back({matches[i].c_str(), classes[i].c_str()});
  std::vector<const char*> proxies;
  for (const auto& d : disabled) proxies.push_back(d.c_str());

  sdnlab_run_options opts{};
  opts.controller = controller.empty() ? nullptr : controller.c_str();
  opts.epochs = epochs;
  if (!seed.empty()) {
    opts.has_seed = 1;
    opts.seed = seed.front();
  }
  opts.declarations = decls.data();
  opts.n_declarations = decls.size();
  if (!disabled.empty()) {
    opts.override_disabled_proxies = 1;
    opts.disabled_proxies = proxies.data();
    opts.n_disabled_proxies = proxies.size();
  }

  ReportHandle rep;
  if (auto s = sdnlab_run(sc.p, &opts, &rep.p); s != SDNLAB_OK) return fail(s);
  if (out_dir.empty()) {
    const char* env = std::getenv("SDNLAB_OUT_DIR");
    out_dir = env != nullptr && *env != '\0' ? env : "sdnlab-out";
  }
  if (auto s = sdnlab_report_write(rep.p, out_dir.c_str()); s != SDNLAB_OK) return fail(s);

  CString report;
  if (auto s = sdnlab_report_json(rep.p, &report.p); s != SDNLAB_OK) return fail(s);
  if (!quiet) std::cout << report.p;
  const bool ok = sdnlab_report_passed(rep.p) != 0;
  std::cerr << "sdnlab: wrote " << out_dir << " (" << (ok ? "passed" : "FAILED") << ")\n";
  return ok ? kOk : kAssertion;
}

int cmd_compare(const std::string& a, const std::string& b) {
  CString out;
  if (auto s = sdnlab_compare_files(a.c_str(), b.c_str(), &out.p); s != SDNLAB_OK) return fail(s);
  std::cout << out.p;
  return kOk;
}

int cmd_replay(const std::string& path) {
  CString out;
  int identical = 0;
  if (auto s = sdnlab_replay_file(path.c_str(), &identical, &out.p); s != SDNLAB_OK) return fail(s);
  std::cout << out.p;
  return identical ? kOk : kAssertion;
}

int cmd_validate(const std::string& path) {
  ScenarioHandle sc;
  if (auto s = sdnlab_scenario_load_file(path.c_str(), &sc.p); s != SDNLAB_OK) return fail(s);
  CString out;
  if (auto s = sdnlab_scenario_summary(sc.p, &out.p); s != SDNLAB_OK) return fail(s);
  std::cout << out.p << "\n";
  return kOk;
}

int cmd_declare(const std::string& path, const std::string& match, const std::string& cls, const std::string& out) {
  ScenarioHandle sc;
  if (auto s = sdnlab_scenario_load_file(path.c_str(), &sc.p); s != SDNLAB_OK) return fail(s);
  if (auto s = sdnlab_scenario_add_declaration(sc.p, match.c_str(), cls.c_str()); s != SDNLAB_OK) return fail(s);
  CString doc;
  if (auto s = sdnlab_scenario_to_json(sc.p, &doc.p); s != SDNLAB_OK) return fail(s);
  if (out.empty() || out == "-") {
    std::cout << doc.p;
    return kOk;
  }
  std::FILE* f = std::fopen(out.c_str(), "wb");
  if (f == nullptr || std::fputs(doc.p, f) < 0 || std::fclose(f) != 0) {
    std::cerr << "sdnlab: cannot write " << out << "\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epoch-driven SDN experiment harness"};
  app.set_version_flag("--version", std::string(sdnlab_version()));
  app.require_subcommand(1);

  std::string scenario, controller, out_dir;
  int epochs = 0;
  std::vector<std::uint64_t> seed;
  std::vector<std::string> declares, disabled;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write metrics, logs and a report");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--controller", controller, "baseline | overseer | gridftp | smoc");
  run->add_option("--out", out_dir, "Output directory (default $SDNLAB_OUT_DIR or ./sdnlab-out)");
  run->add_option("--epochs", epochs, "Override the epoch count")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the RNG seed")->expected(1);
  run->add_option("--declare", declares, "Application declaration MATCH@CLASS (repeatable)");
  run->add_option("--disable-proxy", disabled, "Domain whose slicing proxy is down (repeatable)");
  run->add_flag("-q,--quiet", quiet, "Do not print the report");

  std::string cmp_a, cmp_b;
  auto* compare = app.add_subcommand("compare", "Per-flow rate deltas between two runs (a - b)");
  compare->add_option("a", cmp_a, "report.json or output directory")->required();
  compare->add_option("b", cmp_b, "report.json or output directory")->required();

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-drive a recorded event log and diff the directives");
  replay->add_option("log", replay_path, "Output directory or events.log")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  validate->add_option("scenario", validate_path, "Scenario JSON file")->required();

  std::string decl_path, decl_match, decl_class, decl_out;
  auto* declare = app.add_subcommand("declare", "Add an application declaration to a scenario");
  declare->add_option("scenario", decl_path, "Scenario JSON file")->required();
  declare->add_option("--match", decl_match, "Match pattern, e.g. tp_dst=5001")->required();
  declare->add_option("--class", decl_class, "bandwidth_intensive | latency_oriented | unclassified")->required();
  declare->add_option("-o,--output", decl_out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  if (*run) return cmd_run(scenario, controller, out_dir, epochs, seed, declares, disabled, quiet);
  if (*compare) return cmd_compare(cmp_a, cmp_b);
  if (*replay) return cmd_replay(replay_path);
  if (*validate) return cmd_validate(validate_path);
  if (*declare) return cmd_declare(decl_path, decl_match, decl_class, decl_out);
  return kInput;
}
