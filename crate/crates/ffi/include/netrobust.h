#ifndef NETROBUST_H
#define NETROBUST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NrStatus {
  NR_STATUS_OK = 0,
  NR_STATUS_NULL_POINTER = 1,
  NR_STATUS_INVALID_ARGUMENT = 2,
  NR_STATUS_PARSE = 3,
  /**
   * The metric has no value on this topology.
   */
  NR_STATUS_UNDEFINED = 4,
  NR_STATUS_UNKNOWN_METRIC = 5,
  NR_STATUS_IO = 6,
  NR_STATUS_TOO_LARGE = 7,
  NR_STATUS_PANIC = 8,
} NrStatus;

/**
 * Opaque topology handle.
 */
typedef struct NrTopology NrTopology;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, static storage.
 */
const char *nr_version(void);

/**
 * Message of the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *nr_last_error(void);

/**
 * Builds a topology from `n_edges` (u, w) pairs stored flat in `edges`.
 * `weights` may be null; otherwise it holds one positive weight per edge.
 *
 * # Safety
 * `edges` must point to `2 * n_edges` values, `weights` (if non-null) to
 * `n_edges` values, and `out` must be writable.
 */
enum NrStatus nr_topology_new(size_t nodes,
                              const size_t *edges,
                              size_t n_edges,
                              const double *weights,
                              bool directed,
                              struct NrTopology **out);

/**
 * Reads an edge file; `format` is `edgelist`, `weighted_edgelist` or
 * `as_rel`.
 *
 * # Safety
 * `path` and `format` must be NUL-terminated strings; `out` writable.
 */
enum NrStatus nr_topology_from_file(const char *path,
                                    const char *format,
                                    bool directed,
                                    struct NrTopology **out);

/**
 * # Safety
 * `t` must come from a constructor above and not be used afterwards.
 */
void nr_topology_free(struct NrTopology *t);

/**
 * # Safety
 * `t` must be a live handle or null (returns 0).
 */
size_t nr_topology_node_count(const struct NrTopology *t);

/**
 * # Safety
 * `t` must be a live handle or null (returns 0).
 */
size_t nr_topology_edge_count(const struct NrTopology *t);

/**
 * Value of a global scalar metric.
 *
 * # Safety
 * `t` live, `key` NUL-terminated, `out` writable.
 */
enum NrStatus nr_metric_scalar(const struct NrTopology *t,
                               const char *key,
                               uint64_t seed,
                               double *out);

/**
 * Per-node metric values written to `out[0..len]`; undefined entries are
 * NaN. `written` receives the node count even when `len` is too small, in
 * which case nothing is copied and INVALID_ARGUMENT is returned.
 *
 * # Safety
 * `t` live, `key` NUL-terminated, `out` valid for `len` values, `written`
 * writable.
 */
enum NrStatus nr_metric_per_node(const struct NrTopology *t,
                                 const char *key,
                                 uint64_t seed,
                                 double *out,
                                 size_t len,
                                 size_t *written);

/**
 * JSON report for comma-separated `keys` (null or empty: every key).
 * `options_json` may be null or an options object.
 *
 * # Safety
 * `t` live; string arguments NUL-terminated or null as documented; `out`
 * writable. Free the result with `nr_string_free`.
 */
enum NrStatus nr_analyze_json(const struct NrTopology *t,
                              const char *keys,
                              const char *options_json,
                              char **out);

/**
 * Runs a challenge scenario given as JSON and returns the trace as JSON.
 *
 * # Safety
 * `t` live; `scenario_json` NUL-terminated; `out` writable. Free the
 * result with `nr_string_free`.
 */
enum NrStatus nr_challenge_json(const struct NrTopology *t, const char *scenario_json, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void nr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETROBUST_H */
