#ifndef DIVISORIAL_H
#define DIVISORIAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes.
typedef enum DvStatus {
  DV_STATUS_OK = 0,
  DV_STATUS_NULL_POINTER = 1,
  DV_STATUS_INVALID_UTF8 = 2,
  DV_STATUS_PARSE = 3,
  DV_STATUS_DEGENERATE_BASIS = 4,
  DV_STATUS_ON_DIVISOR = 5,
  DV_STATUS_NOT_FOUND = 6,
  DV_STATUS_INVALID = 7,
  DV_STATUS_PANIC = 8,
} DvStatus;

// An exact polynomial over ℚ(i).
typedef struct DvPoly DvPoly;

// The result of running a scenario.
typedef struct DvReport DvReport;

// A parsed scenario.
typedef struct DvScenario DvScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *dv_last_error_message(void);

// Library version, a static string.
const char *dv_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void dv_string_free(char *s);

// Parse scenario text.
//
// # Safety
// `src` must be a NUL-terminated string; `out` a valid pointer.
enum DvStatus dv_scenario_parse(const char *src, struct DvScenario **out);

// Load one of the bundled scenarios by name (`p2_toric`, …).
//
// # Safety
// `name` must be a NUL-terminated string; `out` a valid pointer.
enum DvStatus dv_scenario_bundled(const char *name, struct DvScenario **out);

// # Safety
// `s` must come from this library and not have been freed.
void dv_scenario_free(struct DvScenario *s);

// Run every requested analysis. `seed` overrides the scenario's seed when
// `use_seed` is true.
//
// # Safety
// `s` must be a live scenario handle; `out` a valid pointer.
enum DvStatus dv_run(const struct DvScenario *s,
                     uint64_t seed,
                     bool use_seed,
                     struct DvReport **out);

// # Safety
// `r` must come from this library and not have been freed.
void dv_report_free(struct DvReport *r);

// The report as JSON (schema 1). Free with [`dv_string_free`].
//
// # Safety
// `r` must be a live report handle; `out` a valid pointer.
enum DvStatus dv_report_json(const struct DvReport *r, char **out);

// The human-readable report. Free with [`dv_string_free`].
//
// # Safety
// `r` must be a live report handle; `out` a valid pointer.
enum DvStatus dv_report_text(const struct DvReport *r, char **out);

// Abelian / subalgebra / Kähler flags. The Kähler flag is -1 when that
// analysis was not requested.
//
// # Safety
// `r` must be a live report handle; the out-pointers valid.
enum DvStatus dv_report_verdicts(const struct DvReport *r,
                                 bool *abelian,
                                 bool *subalgebra,
                                 int32_t *kahler);

// Degree of the divisor, or `DV_STATUS_INVALID` when the divisor analysis
// was not requested.
//
// # Safety
// `r` must be a live report handle; `out` a valid pointer.
enum DvStatus dv_report_divisor_degree(const struct DvReport *r, uint32_t *out);

// Evaluate the metric at a point of the scenario's metric chart. `re` and
// `im` hold `n` coordinates; `g_re` and `g_im` receive `n*n` entries in
// row-major order.
//
// # Safety
// `s` must be a live scenario handle and the arrays sized as described.
enum DvStatus dv_metric_at(const struct DvScenario *s,
                           const double *re,
                           const double *im,
                           uintptr_t n,
                           double *g_re,
                           double *g_im);

// Parse a polynomial in the comma-separated variables `vars` (e.g. "x,y").
//
// # Safety
// `src` and `vars` must be NUL-terminated strings; `out` a valid pointer.
enum DvStatus dv_poly_parse(const char *src, const char *vars, struct DvPoly **out);

// # Safety
// `p` must come from this library and not have been freed.
void dv_poly_free(struct DvPoly *p);

// Canonical text of a polynomial. Free with [`dv_string_free`].
//
// # Safety
// `p` must be a live handle; `out` a valid pointer.
enum DvStatus dv_poly_to_string(const struct DvPoly *p, char **out);

// Product of two polynomials (variables are merged by name).
//
// # Safety
// `a`, `b` must be live handles; `out` a valid pointer.
enum DvStatus dv_poly_mul(const struct DvPoly *a, const struct DvPoly *b, struct DvPoly **out);

// Monic greatest common divisor.
//
// # Safety
// `a`, `b` must be live handles; `out` a valid pointer.
enum DvStatus dv_poly_gcd(const struct DvPoly *a, const struct DvPoly *b, struct DvPoly **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIVISORIAL_H */
