#ifndef DSDECIDE_H
#define DSDECIDE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum DsdStatus {
  DSD_STATUS_OK = 0,
  DSD_STATUS_NULL_POINTER = 1,
  DSD_STATUS_INVALID_UTF8 = 2,
  DSD_STATUS_PARSE = 3,
  DSD_STATUS_NOT_WELL_DEFINED = 4,
  DSD_STATUS_INVALID_LAMBDA = 5,
  DSD_STATUS_SOLVER = 6,
  DSD_STATUS_NOT_FOUND = 7,
  DSD_STATUS_PANIC = 8,
} DsdStatus;

/**
 * A parsed problem file.
 */
typedef struct DsdNetwork DsdNetwork;

/**
 * The outcome of solving a network.
 */
typedef struct DsdSolveResult DsdSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *dsd_last_error(void);

/**
 * Library version as a static string.
 */
const char *dsd_version(void);

/**
 * Parse a problem file held in `text`.
 */
enum DsdStatus dsd_network_parse(const char *text, struct DsdNetwork **out);

void dsd_network_free(struct DsdNetwork *network);

/**
 * Validate a network. `findings` receives the number of violated
 * conditions and `report` one line per finding (an empty string when the
 * network is well-defined). Either output may be null.
 */
enum DsdStatus dsd_network_check(const struct DsdNetwork *network,
                                 bool joint,
                                 size_t *findings,
                                 char **report);

/**
 * The `lambda` given in the problem file. Returns `NotFound` if absent.
 */
enum DsdStatus dsd_network_lambda(const struct DsdNetwork *network, double *out);

/**
 * Solve `network` with weighting factor `lambda` in [0, 1].
 */
enum DsdStatus dsd_solve(const struct DsdNetwork *network,
                         double lambda,
                         struct DsdSolveResult **out);

void dsd_result_free(struct DsdSolveResult *result);

enum DsdStatus dsd_result_expected_value(const struct DsdSolveResult *result, double *out);

/**
 * Optimal act of `decision` for a configuration of its solution table's
 * context, written as space-separated value labels in declaration order
 * (empty when the context is empty). The act label is returned in `act`.
 */
enum DsdStatus dsd_result_psi(const struct DsdSolveResult *result,
                              const char *decision,
                              const char *context,
                              char **act);

/**
 * The solve report as the command line prints it; `machine` selects the
 * tab-separated form.
 */
enum DsdStatus dsd_result_report(const struct DsdSolveResult *result, bool machine, char **out);

/**
 * Release a string returned by the library.
 */
void dsd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSDECIDE_H */
