/* C interface to the sdnlab simulator. All functions are safe to call from
 * any thread on distinct handles; the last error message is per thread. */
#ifndef SDNLAB_SDNLAB_H
#define SDNLAB_SDNLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(SDNLAB_BUILDING)
#define SDNLAB_API __attribute__((visibility("default")))
#else
#define SDNLAB_API
#endif

typedef enum sdnlab_status {
  SDNLAB_OK = 0,
  SDNLAB_ERR_PARSE = 1,
  SDNLAB_ERR_VALIDATION = 2,
  SDNLAB_ERR_UNKNOWN_ENTITY = 3,
  SDNLAB_ERR_DIRECTIVE = 4,
  SDNLAB_ERR_EXHAUSTED = 5,
  SDNLAB_ERR_ISOLATION = 6,
  SDNLAB_ERR_INCOMPARABLE = 7,
  SDNLAB_ERR_REPLAY = 8,
  SDNLAB_ERR_IO = 9,
  SDNLAB_ERR_INVALID_ARGUMENT = 10,
  SDNLAB_ERR_INTERNAL = 11
} sdnlab_status;

typedef struct sdnlab_scenario sdnlab_scenario;
typedef struct sdnlab_report sdnlab_report;

typedef struct sdnlab_declaration {
  const char* match; /* e.g. "ip_src=10.0.0.1,tp_dst=5001" */
  const char* cls;   /* bandwidth_intensive | latency_oriented | unclassified */
} sdnlab_declaration;

/* Zero-initialise, then set what should differ from the scenario file. */
typedef struct sdnlab_run_options {
  const char* controller; /* NULL keeps the scenario's */
  int epochs;             /* <= 0 keeps the scenario's */
  int has_seed;
  uint64_t seed;
  const sdnlab_declaration* declarations;
  size_t n_declarations;
  int override_disabled_proxies; /* nonzero replaces the scenario's list */
  const char* const* disabled_proxies;
  size_t n_disabled_proxies;
} sdnlab_run_options;

SDNLAB_API const char* sdnlab_version(void);
/* Message of the last failed call on this thread ("" if none). */
SDNLAB_API const char* sdnlab_last_error(void);
SDNLAB_API const char* sdnlab_status_name(sdnlab_status s);
SDNLAB_API void sdnlab_string_free(char* s);

/* A topology reference inside `json` is resolved against `base_dir`
 * (may be NULL for the current directory). */
SDNLAB_API sdnlab_status sdnlab_scenario_load_file(const char* path, sdnlab_scenario** out);
SDNLAB_API sdnlab_status sdnlab_scenario_load_string(const char* json, const char* base_dir, sdnlab_scenario** out);
SDNLAB_API void sdnlab_scenario_free(sdnlab_scenario* s);
/* JSON object: name, controller, epochs, seed, nodes, links, slices,
 * events, expectations. */
SDNLAB_API sdnlab_status sdnlab_scenario_summary(const sdnlab_scenario* s, char** out_json);
/* Normalised scenario document (topology inlined). */
SDNLAB_API sdnlab_status sdnlab_scenario_to_json(const sdnlab_scenario* s, char** out_json);
SDNLAB_API sdnlab_status sdnlab_scenario_add_declaration(sdnlab_scenario* s, const char* match, const char* cls);

/* `options` may be NULL. */
SDNLAB_API sdnlab_status sdnlab_run(const sdnlab_scenario* s, const sdnlab_run_options* options, sdnlab_report** out);
SDNLAB_API void sdnlab_report_free(sdnlab_report* r);
/* 1 when every expectation holds, no trace diverged and, for sliced runs,
 * the isolation audit is clean. */
SDNLAB_API int sdnlab_report_passed(const sdnlab_report* r);
SDNLAB_API sdnlab_status sdnlab_report_write(const sdnlab_report* r, const char* dir);
SDNLAB_API sdnlab_status sdnlab_report_metrics_csv(const sdnlab_report* r, char** out);
SDNLAB_API sdnlab_status sdnlab_report_json(const sdnlab_report* r, char** out);
SDNLAB_API sdnlab_status sdnlab_report_directives(const sdnlab_report* r, char** out);

/* Arguments are report.json files or output directories. */
SDNLAB_API sdnlab_status sdnlab_compare_files(const char* a, const char* b, char** out_json);
/* `path` is an output directory or its events.log. */
SDNLAB_API sdnlab_status sdnlab_replay_file(const char* path, int* identical, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* SDNLAB_SDNLAB_H */
