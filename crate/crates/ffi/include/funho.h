#ifndef FUNHO_H
#define FUNHO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FUNHO_STATUS_OK = 0,
  FUNHO_STATUS_VERIFY_FAILED = 1,
  FUNHO_STATUS_INVALID_INPUT = 2,
  FUNHO_STATUS_RESOURCE = 3,
  FUNHO_STATUS_INTERNAL = 4,
  FUNHO_STATUS_NULL_POINTER = 5,
} FunhoStatus;

/**
 * An algebra over a field, with its lazily built complexes.
 */
typedef struct FunhoAlgebra FunhoAlgebra;

/**
 * A finished verification run.
 */
typedef struct FunhoReport FunhoReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *funho_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *funho_version(void);

/**
 * Builds an algebra such as `trunc:2` over a field such as `q` or `f3`.
 * `max_ambient_dim` of 0 selects the default cap.
 *
 * # Safety
 * `spec` and `field` must be NUL-terminated strings; `out` must be writable.
 */
FunhoStatus funho_algebra_new(const char *spec,
                              const char *field,
                              uint64_t max_ambient_dim,
                              FunhoAlgebra **out);

/**
 * # Safety
 * `alg` must come from `funho_algebra_new`; `out` must be writable.
 */
FunhoStatus funho_algebra_dim(const FunhoAlgebra *alg, size_t *out);

/**
 * # Safety
 * `alg` must come from `funho_algebra_new` and not be used afterwards. Null is ignored.
 */
void funho_algebra_free(FunhoAlgebra *alg);

/**
 * Writes dims of `theory` (hh, hc, hgamma, hgammac) in degrees 0..=max_degree into `out`,
 * which must hold `max_degree + 1` entries.
 *
 * # Safety
 * `alg` must be a live handle, `theory` a NUL-terminated string, `out` an array of `len` entries.
 */
FunhoStatus funho_homology_dims(const FunhoAlgebra *alg,
                                const char *theory,
                                size_t max_degree,
                                size_t *out,
                                size_t len);

/**
 * The homology table as JSON. Free the string with `funho_string_free`.
 *
 * # Safety
 * `alg` must be a live handle, `theory` a NUL-terminated string, `out` writable.
 */
FunhoStatus funho_table_json(const FunhoAlgebra *alg,
                             const char *theory,
                             size_t max_degree,
                             char **out);

/**
 * Runs a suite. `algebras` and `fields` are comma lists; null selects the default corpus.
 * Returns `FUNHO_STATUS_OK` or `FUNHO_STATUS_VERIFY_FAILED` with `*out` set in both cases.
 *
 * # Safety
 * String arguments must be NUL-terminated or null where allowed; `out` must be writable.
 */
FunhoStatus funho_verify(const char *suite,
                         const char *algebras,
                         const char *fields,
                         size_t max_degree,
                         uint64_t seed,
                         FunhoReport **out);

/**
 * `FUNHO_STATUS_OK` if no check failed, else `FUNHO_STATUS_VERIFY_FAILED`.
 *
 * # Safety
 * `r` must be a live report handle.
 */
FunhoStatus funho_report_status(const FunhoReport *r);

/**
 * # Safety
 * `r` must be a live report handle; the out pointers must be writable.
 */
FunhoStatus funho_report_counts(const FunhoReport *r, size_t *pass, size_t *fail, size_t *skipped);

/**
 * Report JSON without timings, owned by the report.
 *
 * # Safety
 * `r` must be a live report handle.
 */
const char *funho_report_json(const FunhoReport *r);

/**
 * # Safety
 * `r` must come from `funho_verify` and not be used afterwards. Null is ignored.
 */
void funho_report_free(FunhoReport *r);

/**
 * # Safety
 * `s` must come from this library's string-returning calls. Null is ignored.
 */
void funho_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUNHO_H */
