#ifndef QUADPERM_H
#define QUADPERM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum QpStatus {
  QP_STATUS_OK = 0,
  QP_STATUS_NULL_POINTER = 1,
  QP_STATUS_INVALID_ARGUMENT = 2,
  QP_STATUS_FIELD_ERROR = 3,
  QP_STATUS_VERIFICATION_ERROR = 4,
  QP_STATUS_PANIC = 5,
} QpStatus;

/**
 * Opaque finite field context.
 */
typedef struct QpField QpField;

/**
 * Criterion and brute-force verdicts for one tuple.
 */
typedef struct QpVerdict {
  bool criterion;
  bool oracle;
  bool cond[5];
} QpVerdict;

/**
 * Counts from a criterion-versus-oracle sweep.
 */
typedef struct QpSweepSummary {
  uint64_t total;
  uint64_t permutations;
  uint64_t mismatches;
} QpSweepSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the default field of order `p^n`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the caller.
 */
enum QpStatus qp_field_new(uint32_t p, uint32_t n, struct QpField **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `field` must be null or a handle from [`qp_field_new`] not yet freed.
 */
void qp_field_free(struct QpField *field);

/**
 * Number of elements of the field.
 *
 * # Safety
 * `field` must be a live handle and `out` a valid pointer.
 */
enum QpStatus qp_field_size(const struct QpField *field, uint32_t *out);

/**
 * Product of two encoded elements.
 *
 * # Safety
 * `field` must be a live handle and `out` a valid pointer.
 */
enum QpStatus qp_field_mul(const struct QpField *field, uint32_t a, uint32_t b, uint32_t *out);

/**
 * Smallest admissible `r` for `(q, Q)`, or 0 when none exists.
 */
uint64_t qp_canonical_r(uint64_t q, uint64_t big_q);

/**
 * Evaluates the criterion and the brute-force oracle for `X^r A(X^{q−1})` with
 * `A = aX^{Q+1} + bX^Q + cX + d`; `coeffs` holds the encodings of `a, b, c, d`.
 *
 * # Safety
 * `field` must be a live handle of degree `2k`, `coeffs` must point to four values and `out`
 * must be a valid pointer.
 */
enum QpStatus qp_check(const struct QpField *field,
                       uint32_t k,
                       uint32_t l,
                       uint64_t r,
                       const uint32_t *coeffs,
                       struct QpVerdict *out);

/**
 * Runs the criterion-versus-oracle sweep; `samples == 0` means exhaustive.
 *
 * # Safety
 * `field` must be a live handle of degree `2k` and `out` a valid pointer.
 */
enum QpStatus qp_sweep(const struct QpField *field,
                       uint32_t k,
                       uint32_t l,
                       uint64_t samples,
                       uint64_t seed,
                       struct QpSweepSummary *out);

/**
 * Checks every dense bivariate identity for `F_{q^n}`; `out` receives whether all hold.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QpStatus qp_identity_verify(uint64_t q, uint32_t n, bool *out);

/**
 * Static description of a status code.
 */
const char *qp_status_message(enum QpStatus status);

/**
 * Message of the last failure on this thread; valid until the next failing call.
 */
const char *qp_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUADPERM_H */
