#ifndef CONVRPTW_H
#define CONVRPTW_H

/* Generated by cbindgen from convrptw-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ConvrptwStatus {
  /**
   * The call succeeded.
   */
  CONVRPTW_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CONVRPTW_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CONVRPTW_STATUS_INVALID_UTF8 = 2,
  /**
   * The file could not be read or written.
   */
  CONVRPTW_STATUS_IO = 3,
  /**
   * The file or text exists but does not parse as the expected format.
   */
  CONVRPTW_STATUS_PARSE = 4,
  /**
   * The instance admits no feasible plan.
   */
  CONVRPTW_STATUS_INFEASIBLE = 5,
  /**
   * A size or effort limit refused the computation.
   */
  CONVRPTW_STATUS_LIMITS = 6,
  /**
   * A numeric or structural argument is out of range.
   */
  CONVRPTW_STATUS_BAD_PARAMS = 7,
  /**
   * The library panicked; the handle states are unspecified but valid.
   */
  CONVRPTW_STATUS_PANIC = 8,
} ConvrptwStatus;

/**
 * An immutable routing instance.  Opaque; create with the `_read` or
 * `_from_json` constructors and release with [`convrptw_instance_free`].
 */
typedef struct ConvrptwInstance ConvrptwInstance;

/**
 * A multi-day plan.  Opaque; produced by the solver entry points or read
 * from a file, released with [`convrptw_solution_free`].
 */
typedef struct ConvrptwSolution ConvrptwSolution;

/**
 * Headline measurements of a solution against its instance.
 */
typedef struct ConvrptwMetrics {
  /**
   * Vehicles serving at least one customer.
   */
  uint64_t nv;
  /**
   * Total travel time over all vehicles and days, in hours.
   */
  double travel_time_hours;
  /**
   * Total travel distance, in metres.
   */
  int64_t distance_metres;
  /**
   * Percentage of visits arriving after the window close.
   */
  double ptw_pct;
  /**
   * Total lateness as a percentage of total travel time.
   */
  double ltw_pct;
  /**
   * True iff every route respects windows, capacity and the horizon.
   */
  bool feasible;
} ConvrptwMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null when the
 * last call succeeded.  The pointer stays valid until the next failing
 * call on the same thread.
 */
const char *convrptw_last_error(void);

/**
 * Library version as a static nul-terminated string; never freed.
 */
const char *convrptw_version(void);

/**
 * Reads an instance file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be a valid pointer.
 */
enum ConvrptwStatus convrptw_instance_read(const char *path, struct ConvrptwInstance **out);

/**
 * Parses an instance from its JSON document text.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be a valid pointer.
 */
enum ConvrptwStatus convrptw_instance_from_json(const char *text, struct ConvrptwInstance **out);

/**
 * Releases an instance handle; a null pointer is a no-op.
 *
 * # Safety
 * `instance` must be null or a pointer returned by an instance constructor,
 * and must not be used afterwards.
 */
void convrptw_instance_free(struct ConvrptwInstance *instance);

/**
 * Number of customers; 0 on a null handle.
 *
 * # Safety
 * `instance` must be null or a live instance handle.
 */
uint64_t convrptw_instance_customer_count(const struct ConvrptwInstance *instance);

/**
 * Number of planning days; 0 on a null handle.
 *
 * # Safety
 * `instance` must be null or a live instance handle.
 */
uint64_t convrptw_instance_day_count(const struct ConvrptwInstance *instance);

/**
 * Vehicle capacity; 0 on a null handle.
 *
 * # Safety
 * `instance` must be null or a live instance handle.
 */
uint64_t convrptw_instance_capacity(const struct ConvrptwInstance *instance);

/**
 * Solves an instance from scratch: construction, route elimination under
 * the given wall-clock budget, then distance descent.
 *
 * # Safety
 * `instance` must be a live instance handle; `out` must be valid.
 */
enum ConvrptwStatus convrptw_solve(const struct ConvrptwInstance *instance,
                                   double ct_max_seconds,
                                   uint64_t seed,
                                   struct ConvrptwSolution **out);

/**
 * Carries a previous plan into a new planning period, keeping drivers on
 * their customers where feasible.  When `out_ic_pct` is non-null it
 * receives the percentage of retained customers that changed vehicle.
 *
 * # Safety
 * `instance` and `prev` must be live handles; `out` must be valid;
 * `out_ic_pct` may be null.
 */
enum ConvrptwStatus convrptw_update(const struct ConvrptwInstance *instance,
                                    const struct ConvrptwSolution *prev,
                                    double ct_max_seconds,
                                    uint64_t seed,
                                    struct ConvrptwSolution **out,
                                    double *out_ic_pct);

/**
 * Proves the minimum vehicle count exhaustively.  `max_nodes` bounds the
 * assignment attempts; pass 0 for the default budget.
 *
 * # Safety
 * `instance` must be a live instance handle; `out_min_vehicles` must be
 * valid.
 */
enum ConvrptwStatus convrptw_oracle_min_vehicles(const struct ConvrptwInstance *instance,
                                                 uint64_t max_nodes,
                                                 uint64_t *out_min_vehicles);

/**
 * Reads a solution file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be valid.
 */
enum ConvrptwStatus convrptw_solution_read(const char *path, struct ConvrptwSolution **out);

/**
 * Validates `solution` against `instance` and writes it as a solution
 * document naming that instance.
 *
 * # Safety
 * `instance` and `solution` must be live handles; `path` must be a
 * nul-terminated string.
 */
enum ConvrptwStatus convrptw_solution_write(const struct ConvrptwInstance *instance,
                                            const struct ConvrptwSolution *solution,
                                            const char *path);

/**
 * Releases a solution handle; a null pointer is a no-op.
 *
 * # Safety
 * `solution` must be null or a pointer returned by this library, and must
 * not be used afterwards.
 */
void convrptw_solution_free(struct ConvrptwSolution *solution);

/**
 * Vehicles serving at least one customer; 0 on a null handle.
 *
 * # Safety
 * `solution` must be null or a live solution handle.
 */
uint64_t convrptw_solution_nv(const struct ConvrptwSolution *solution);

/**
 * Evaluates `solution` against `instance`.
 *
 * # Safety
 * `instance` and `solution` must be live handles; `out_metrics` must be
 * valid.
 */
enum ConvrptwStatus convrptw_solution_metrics(const struct ConvrptwInstance *instance,
                                              const struct ConvrptwSolution *solution,
                                              struct ConvrptwMetrics *out_metrics);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONVRPTW_H */
