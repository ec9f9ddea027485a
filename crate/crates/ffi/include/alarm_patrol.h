#ifndef ALARM_PATROL_H
#define ALARM_PATROL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ApStatus {
  AP_STATUS_OK = 0,
  AP_STATUS_NULL_POINTER = 1,
  AP_STATUS_INVALID_UTF8 = 2,
  /**
   * The instance document or file contents were rejected.
   */
  AP_STATUS_MALFORMED = 3,
  AP_STATUS_INVALID_ARGUMENT = 4,
  AP_STATUS_SOLVER_FAILURE = 5,
  AP_STATUS_TIMEOUT = 6,
  AP_STATUS_IO = 7,
  AP_STATUS_PANIC = 8,
} ApStatus;

typedef enum ApAlgorithm {
  AP_ALGORITHM_DP = 0,
  AP_ALGORITHM_BNB = 1,
  AP_ALGORITHM_APPROX_DP = 2,
  AP_ALGORITHM_APPROX_BNB = 3,
} ApAlgorithm;

typedef struct ApInstance ApInstance;

typedef struct ApPlacement ApPlacement;

typedef struct ApSolution ApSolution;

/**
 * Solver options; obtain defaults from [`ap_solve_options_default`].
 */
typedef struct ApSolveOptions {
  enum ApAlgorithm algorithm;
  double rho;
  double delta;
  uint32_t rand_orders;
  uint64_t seed;
  /**
   * Zero disables the limit.
   */
  uint64_t time_limit_ms;
  bool auto_topology;
} ApSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer is
 * owned by the library and stays valid until the next failing call.
 */
const char *ap_last_error_message(void);

void ap_string_free(char *s);

/**
 * Parses an instance document (TOML text).
 */
enum ApStatus ap_instance_from_str(const char *doc, struct ApInstance **out);

enum ApStatus ap_instance_from_file(const char *path, struct ApInstance **out);

/**
 * Generates a worst-case instance; see the library documentation.
 */
enum ApStatus ap_gen_worstcase(size_t targets, double eps, uint64_t seed, struct ApInstance **out);

/**
 * Serializes the instance back to a TOML document.
 */
enum ApStatus ap_instance_to_string(const struct ApInstance *inst, char **out);

void ap_instance_free(struct ApInstance *inst);

/**
 * Zero for a null handle.
 */
size_t ap_instance_num_vertices(const struct ApInstance *inst);

size_t ap_instance_num_targets(const struct ApInstance *inst);

size_t ap_instance_num_signals(const struct ApInstance *inst);

struct ApSolveOptions ap_solve_options_default(void);

/**
 * Solves the game from `vertex`. A null `opts` means the defaults.
 */
enum ApStatus ap_solve(const struct ApInstance *inst,
                       size_t vertex,
                       const struct ApSolveOptions *opts,
                       struct ApSolution **out);

/**
 * NaN for a null handle.
 */
double ap_solution_value(const struct ApSolution *sol);

/**
 * The solution as JSON: `{vertex, g_v, signals, best_responses}`.
 */
enum ApStatus ap_solution_to_json(const struct ApSolution *sol, char **out);

void ap_solution_free(struct ApSolution *sol);

/**
 * Solves from every vertex. A null `opts` means the defaults.
 */
enum ApStatus ap_placement(const struct ApInstance *inst,
                           const struct ApSolveOptions *opts,
                           struct ApPlacement **out);

/**
 * Best vertex; `usize::MAX` for a null handle.
 */
size_t ap_placement_best(const struct ApPlacement *p);

enum ApStatus ap_placement_value(const struct ApPlacement *p, size_t vertex, double *out);

/**
 * Missed-detection bound; `SOLVER_FAILURE` when it is undefined.
 */
enum ApStatus ap_placement_alpha_bound(const struct ApPlacement *p, double *out);

void ap_placement_free(struct ApPlacement *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALARM_PATROL_H */
