#ifndef ATC_H
#define ATC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AtcStatus {
  ATC_STATUS_OK = 0,
  ATC_STATUS_NULL_ARGUMENT = 1,
  ATC_STATUS_INVALID_ARGUMENT = 2,
  ATC_STATUS_IO = 3,
  ATC_STATUS_FORMAT = 4,
  ATC_STATUS_INFEASIBLE = 5,
  ATC_STATUS_BAD_QUERY = 6,
  ATC_STATUS_PANIC = 7,
} AtcStatus;

typedef enum AtcAlgorithm {
  ATC_ALGORITHM_BASIC = 0,
  ATC_ALGORITHM_BULK = 1,
  ATC_ALGORITHM_LOCAL = 2,
  ATC_ALGORITHM_BASELINE = 3,
} AtcAlgorithm;

typedef struct AtcGraph AtcGraph;

typedef struct AtcIndex AtcIndex;

typedef struct AtcResult AtcResult;

/**
 * Query parameters. Initialize with [`atc_query_init`], then set the
 * fields. `attrs` may be null when `n_attrs` is 0.
 */
typedef struct AtcQuery {
  const uint64_t *nodes;
  size_t n_nodes;
  const char *const *attrs;
  size_t n_attrs;
  uint32_t k;
  uint32_t d;
  bool auto_kd;
  /**
   * An `AtcAlgorithm` value.
   */
  uint32_t algo;
  uint32_t epsilon_num;
  uint32_t epsilon_den;
  uint32_t gamma_num;
  uint32_t gamma_den;
  size_t eta;
} AtcQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next `atc_*` call on the same thread.
 */
const char *atc_last_error(void);

/**
 * Library version, including the index file format.
 */
const char *atc_version(void);

/**
 * Loads an edge list and, when `attrs_path` is not null, an attribute file.
 *
 * # Safety
 * Paths must be NUL-terminated strings; `out` must be writable.
 */
enum AtcStatus atc_graph_load(const char *edges_path,
                              const char *attrs_path,
                              struct AtcGraph **out);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t atc_graph_num_vertices(const struct AtcGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t atc_graph_num_edges(const struct AtcGraph *g);

/**
 * # Safety
 * `g` must be null or a handle from `atc_graph_load`/`atc_index_load` not yet freed.
 */
void atc_graph_free(struct AtcGraph *g);

/**
 * Builds the AT-index of `g`.
 *
 * # Safety
 * `g` must be a live graph handle; `out` must be writable.
 */
enum AtcStatus atc_index_build(const struct AtcGraph *g, struct AtcIndex **out);

/**
 * Writes the index of `g` to `path`.
 *
 * # Safety
 * `g` and `idx` must be live handles, `idx` built from `g`.
 */
enum AtcStatus atc_index_save(const struct AtcGraph *g,
                              const struct AtcIndex *idx,
                              const char *path);

/**
 * Reads an index file, returning the graph stored in it and the index.
 *
 * # Safety
 * `path` must be a NUL-terminated string; both outputs must be writable.
 */
enum AtcStatus atc_index_load(const char *path,
                              struct AtcGraph **graph_out,
                              struct AtcIndex **index_out);

/**
 * Number of stored trussness entries.
 *
 * # Safety
 * `idx` must be null or a live index handle.
 */
size_t atc_index_entry_count(const struct AtcIndex *idx);

/**
 * # Safety
 * `idx` must be null or an index handle not yet freed.
 */
void atc_index_free(struct AtcIndex *idx);

/**
 * Fills `q` with the defaults: local search, k = 4, d = 4, ε = 0.03,
 * γ = 0.2, η = 1000, no nodes or attributes.
 *
 * # Safety
 * `q` must be null or writable.
 */
void atc_query_init(struct AtcQuery *q);

/**
 * Runs one query. `idx` may be null except for local search.
 * Returns `Infeasible` when no community exists.
 *
 * # Safety
 * Handles must be live; `q` must point to an initialized query whose arrays
 * hold `n_nodes` ids and `n_attrs` NUL-terminated labels.
 */
enum AtcStatus atc_search(const struct AtcGraph *g,
                          const struct AtcIndex *idx,
                          const struct AtcQuery *q,
                          struct AtcResult **out);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
size_t atc_result_num_vertices(const struct AtcResult *r);

/**
 * Copies up to `cap` member ids (ascending) into `buf`; returns the total
 * number of members.
 *
 * # Safety
 * `r` must be a live result handle; `buf` must hold `cap` values or be null
 * with `cap` 0.
 */
size_t atc_result_vertices(const struct AtcResult *r, uint64_t *buf, size_t cap);

/**
 * Attribute score as a fraction.
 *
 * # Safety
 * `r` must be a live result handle; outputs must be writable.
 */
enum AtcStatus atc_result_score(const struct AtcResult *r, int64_t *num, int64_t *den);

/**
 * Score with six decimals; owned by the result.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
const char *atc_result_score_text(const struct AtcResult *r);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
uint32_t atc_result_k(const struct AtcResult *r);

/**
 * Query distance reached by the community.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
uint32_t atc_result_d(const struct AtcResult *r);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
uint32_t atc_result_diameter(const struct AtcResult *r);

/**
 * # Safety
 * `r` must be null or a result handle not yet freed.
 */
void atc_result_free(struct AtcResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATC_H */
