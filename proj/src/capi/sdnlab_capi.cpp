#include "sdnlab/sdnlab.h"

#include <cstring>
#include <new>

#include "sdnlab/error.hpp"
#include "sdnlab/harness.hpp"

struct sdnlab_scenario {
  nlohmann::json document;
  sdnlab::Scenario scenario;
};

struct sdnlab_report {
  sdnlab::Report report;
};

namespace {

thread_local std::string g_last_error;

sdnlab_status status_of(sdnlab::ErrorKind k) {
  using sdnlab::ErrorKind;
  switch (k) {
    case ErrorKind::Parse: return SDNLAB_ERR_PARSE;
    case ErrorKind::Validation: return SDNLAB_ERR_VALIDATION;
    case ErrorKind::UnknownEntity: return SDNLAB_ERR_UNKNOWN_ENTITY;
    case ErrorKind::Directive: return SDNLAB_ERR_DIRECTIVE;
    case ErrorKind::Exhausted: return SDNLAB_ERR_EXHAUSTED;
    case ErrorKind::Isolation: return SDNLAB_ERR_ISOLATION;
    case ErrorKind::Incomparable: return SDNLAB_ERR_INCOMPARABLE;
    case ErrorKind::Replay: return SDNLAB_ERR_REPLAY;
    case ErrorKind::Io: return SDNLAB_ERR_IO;
  }
  return SDNLAB_ERR_INTERNAL;
}

template <class F>
sdnlab_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return SDNLAB_OK;
  } catch (const sdnlab::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SDNLAB_ERR_VALIDATION;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SDNLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDNLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SDNLAB_ERR_INTERNAL;
  }
}

sdnlab_status invalid(const char* what) {
  g_last_error = what;
  return SDNLAB_ERR_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* sdnlab_version(void) {
  static const std::string v(sdnlab::kVersion);
  return v.c_str();
}

const char* sdnlab_last_error(void) { return g_last_error.c_str(); }

const char* sdnlab_status_name(sdnlab_status s) {
  switch (s) {
    case SDNLAB_OK: return "ok";
    case SDNLAB_ERR_PARSE: return "parse";
    case SDNLAB_ERR_VALIDATION: return "validation";
    case SDNLAB_ERR_UNKNOWN_ENTITY: return "unknown_entity";
    case SDNLAB_ERR_DIRECTIVE: return "directive";
    case SDNLAB_ERR_EXHAUSTED: return "exhausted";
    case SDNLAB_ERR_ISOLATION: return "isolation";
    case SDNLAB_ERR_INCOMPARABLE: return "incomparable";
    case SDNLAB_ERR_REPLAY: return "replay";
    case SDNLAB_ERR_IO: return "io";
    case SDNLAB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SDNLAB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void sdnlab_string_free(char* s) { std::free(s); }

sdnlab_status sdnlab_scenario_load_file(const char* path, sdnlab_scenario** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = sdnlab::load_scenario_file(path);
    auto doc = s.document;
    *out = new sdnlab_scenario{std::move(doc), std::move(s)};
  });
}

sdnlab_status sdnlab_scenario_load_string(const char* json, const char* base_dir, sdnlab_scenario** out) {
  if (json == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = sdnlab::load_scenario(json, "scenario", base_dir != nullptr ? base_dir : "");
    auto doc = s.document;
    *out = new sdnlab_scenario{std::move(doc), std::move(s)};
  });
}

void sdnlab_scenario_free(sdnlab_scenario* s) { delete s; }

sdnlab_status sdnlab_scenario_summary(const sdnlab_scenario* s, char** out_json) {
  if (s == nullptr || out_json == nullptr) return invalid("null argument");
  return guarded([&] {
    const auto& sc = s->scenario;
    nlohmann::json j{{"name", sc.name},
                     {"controller", sc.controller},
                     {"epochs", sc.epochs},
                     {"seed", sc.seed},
                     {"nodes", sc.topo->nodes().size()},
                     {"links", sc.topo->links().size()},
                     {"slices", sc.slices.size()},
                     {"events", sc.events.size()},
                     {"expectations", sc.expectations.size()}};
    *out_json = dup(j.dump());
  });
}

sdnlab_status sdnlab_scenario_to_json(const sdnlab_scenario* s, char** out_json) {
  if (s == nullptr || out_json == nullptr) return invalid("null argument");
  return guarded([&] { *out_json = dup(s->document.dump(2) + "\n"); });
}

sdnlab_status sdnlab_scenario_add_declaration(sdnlab_scenario* s, const char* match, const char* cls) {
  if (s == nullptr || match == nullptr || cls == nullptr) return invalid("null argument");
  return guarded([&] {
    auto doc = s->document;
    sdnlab::add_declaration(doc, match, cls);
    auto sc = sdnlab::load_scenario(doc);
    s->document = std::move(doc);
    s->scenario = std::move(sc);
  });
}

sdnlab_status sdnlab_run(const sdnlab_scenario* s, const sdnlab_run_options* options, sdnlab_report** out) {
  if (s == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    sdnlab::RunOverrides o;
    bool any = false;
    if (options != nullptr) {
      if (options->controller != nullptr) o.controller = options->controller, any = true;
      if (options->epochs > 0) o.epochs = options->epochs, any = true;
      if (options->has_seed) o.seed = options->seed, any = true;
      if (options->n_declarations > 0 && options->declarations == nullptr) {
        throw sdnlab::Error(sdnlab::ErrorKind::Validation, "declarations pointer is null");
      }
      for (std::size_t i = 0; i < options->n_declarations; ++i) {
        const auto& d = options->declarations[i];
        if (d.match == nullptr || d.cls == nullptr) throw sdnlab::Error(sdnlab::ErrorKind::Validation, "null declaration field");
        o.declarations.emplace_back(d.match, d.cls);
        any = true;
      }
      if (options->override_disabled_proxies) {
        std::vector<std::string> v;
        for (std::size_t i = 0; i < options->n_disabled_proxies; ++i) v.emplace_back(options->disabled_proxies[i]);
        o.disabled_proxies = std::move(v);
        any = true;
      }
    }
    auto r = std::make_unique<sdnlab_report>();
    if (any) {
      r->report = sdnlab::run_scenario(sdnlab::load_scenario(sdnlab::apply_overrides(s->document, o)));
    } else {
      r->report = sdnlab::run_scenario(s->scenario);
    }
    *out = r.release();
  });
}

void sdnlab_report_free(sdnlab_report* r) { delete r; }

int sdnlab_report_passed(const sdnlab_report* r) { return r != nullptr && r->report.passed() ? 1 : 0; }

sdnlab_status sdnlab_report_write(const sdnlab_report* r, const char* dir) {
  if (r == nullptr || dir == nullptr) return invalid("null argument");
  return guarded([&] { r->report.write(dir); });
}

sdnlab_status sdnlab_report_metrics_csv(const sdnlab_report* r, char** out) {
  if (r == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = dup(r->report.metrics_csv()); });
}

sdnlab_status sdnlab_report_json(const sdnlab_report* r, char** out) {
  if (r == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = dup(r->report.report_json().dump(2) + "\n"); });
}

sdnlab_status sdnlab_report_directives(const sdnlab_report* r, char** out) {
  if (r == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = dup(r->report.directives_log()); });
}

sdnlab_status sdnlab_compare_files(const char* a, const char* b, char** out_json) {
  if (a == nullptr || b == nullptr || out_json == nullptr) return invalid("null argument");
  return guarded([&] { *out_json = dup(sdnlab::compare_report_files(a, b).dump(2) + "\n"); });
}

sdnlab_status sdnlab_replay_file(const char* path, int* identical, char** out_json) {
  if (path == nullptr || identical == nullptr || out_json == nullptr) return invalid("null argument");
  return guarded([&] {
    auto res = sdnlab::replay_file(path);
    nlohmann::json j{{"identical", res.identical}, {"events", res.events}, {"directives", res.directives}};
    if (res.first_difference) {
      j["first_difference"] = *res.first_difference;
      j["expected"] = res.expected;
      j["actual"] = res.actual;
    }
    *identical = res.identical ? 1 : 0;
    *out_json = dup(j.dump(2) + "\n");
  });
}

}  // extern "C"
