#ifndef SUBHYP_H
#define SUBHYP_H

/* Generated by cbindgen from the subhyp-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by the fallible entry points.
typedef enum SubhypStatus {
  SUBHYP_STATUS_OK = 0,
  SUBHYP_STATUS_NULL_ARGUMENT = 1,
  SUBHYP_STATUS_INVALID_ARGUMENT = 2,
  SUBHYP_STATUS_INVALID_DOMAIN = 3,
  SUBHYP_STATUS_POINT_OUTSIDE_DOMAIN = 4,
  SUBHYP_STATUS_DISCONNECTED = 5,
  SUBHYP_STATUS_NUMERIC_FAILURE = 6,
  SUBHYP_STATUS_PANIC = 7,
} SubhypStatus;

// Opaque planar domain handle.
typedef struct SubhypDomain SubhypDomain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *subhyp_version(void);

// Copy the last error message on this thread into `buf` (truncated to
// `len − 1` bytes, always NUL-terminated). Returns the full message length.
//
// # Safety
// `buf` must point to `len` writable bytes, or be NULL (then only the
// required length is returned).
uintptr_t subhyp_last_error_message(char *buf, uintptr_t len);

// Parse a domain from its JSON encoding
// `{"name": ..., "outer": [[x,y],...], "holes": [...]}`.
// Returns NULL on failure (see `subhyp_last_error_message`).
//
// # Safety
// `json` must be a valid NUL-terminated string.
struct SubhypDomain *subhyp_domain_from_json(const char *json);

// Build a catalog domain by name ("square", "disk-256", "annulus",
// "inward-cusp-2", "exterior-cusp-2", "rooms-and-corridors").
//
// # Safety
// `name` must be a valid NUL-terminated string.
struct SubhypDomain *subhyp_domain_from_catalog(const char *name);

// Release a domain handle. NULL is accepted.
//
// # Safety
// `domain` must have been returned by one of the constructors and not freed
// twice.
void subhyp_domain_free(struct SubhypDomain *domain);

// Membership in the open set: 1 inside, 0 outside or on the boundary,
// −1 when the handle is NULL.
//
// # Safety
// `domain` must be a live handle or NULL.
int32_t subhyp_domain_contains(const struct SubhypDomain *domain, double x, double y);

// Exact boundary distance of an interior point. `uniform_norm` selects the
// max-norm (nonzero) or the Euclidean norm (zero).
//
// # Safety
// `domain` must be a live handle; `out` must point to a writable f64.
enum SubhypStatus subhyp_boundary_distance(const struct SubhypDomain *domain,
                                           double x,
                                           double y,
                                           int32_t uniform_norm,
                                           double *out);

// Subhyperbolic distance estimate between two interior points: an upper
// bound with the last refinement delta reported as the gap.
//
// # Safety
// `domain` must be a live handle; `out_value` and `out_gap` must point to
// writable f64 slots (out_gap may be NULL).
enum SubhypStatus subhyp_distance(const struct SubhypDomain *domain,
                                  double alpha,
                                  double x0,
                                  double y0,
                                  double x1,
                                  double y1,
                                  double h,
                                  double tol,
                                  double *out_value,
                                  double *out_gap);

// Sobolev extension verdict for W^1_p at the metric criterion's exponent:
// writes 0 (extension domain), 1 (not an extension domain) or
// 2 (inconclusive) into `out_verdict`.
//
// # Safety
// `domain` must be a live handle; `out_verdict` must point to a writable
// i32.
enum SubhypStatus subhyp_classify_extension(const struct SubhypDomain *domain,
                                            double p,
                                            uint32_t budget,
                                            uint64_t seed,
                                            int32_t *out_verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBHYP_H */
