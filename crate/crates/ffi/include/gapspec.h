#ifndef GAPSPEC_H
#define GAPSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GapStatus {
  GAP_STATUS_OK = 0,
  GAP_STATUS_NULL_POINTER = 1,
  GAP_STATUS_INVALID_ARGUMENT = 2,
  GAP_STATUS_NON_HERMITIAN = 3,
  GAP_STATUS_DIMENSION_MISMATCH = 4,
  GAP_STATUS_PRECONDITION_VIOLATED = 5,
  GAP_STATUS_NON_CONVERGENCE = 6,
  GAP_STATUS_INTERNAL = 7,
} GapStatus;

/**
 * Side codes accepted as `int32_t` arguments.
 */
typedef enum GapSide {
  GAP_SIDE_PLUS = 0,
  GAP_SIDE_MINUS = 1,
} GapSide;

typedef enum GapLevelStatus {
  GAP_LEVEL_STATUS_CLAMPED_AT_A = 0,
  GAP_LEVEL_STATUS_INTERIOR = 1,
  GAP_LEVEL_STATUS_CLAMPED_AT_B = 2,
} GapLevelStatus;

/**
 * Opaque operator handle.
 */
typedef struct GapOperator GapOperator;

/**
 * `k0_plus` and `k0_minus` are 0 when unknown.
 */
typedef struct GapProfile {
  double a_minus;
  double a_plus;
  double b_minus;
  double b_plus;
  size_t k0_plus;
  size_t k0_minus;
} GapProfile;

typedef struct GapLevel {
  enum GapSide side;
  size_t k;
  double value;
  enum GapLevelStatus status;
  double residual;
  size_t iterations;
} GapLevel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *gap_last_error_message(void);

/**
 * Build an operator from the full `n x n` matrix; the first `n_plus`
 * coordinates span `H+`.
 *
 * # Safety
 * `data` must point to `n * n` doubles and `out` must be writable.
 */
enum GapStatus gap_operator_from_full(const double *data,
                                      size_t n,
                                      size_t n_plus,
                                      struct GapOperator **out);

/**
 * Build an operator from its blocks: `app` is `n_plus x n_plus`, `apm` is
 * `n_plus x n_minus` and `amm` is `n_minus x n_minus`.
 *
 * # Safety
 * The block pointers must cover the stated sizes and `out` must be writable.
 */
enum GapStatus gap_operator_from_blocks(const double *app,
                                        const double *apm,
                                        const double *amm,
                                        size_t n_plus,
                                        size_t n_minus,
                                        struct GapOperator **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `op` must come from this library and must not be used afterwards.
 */
void gap_operator_free(struct GapOperator *op);

/**
 * # Safety
 * `op` must be a live handle; `n_plus` and `n_minus` must be writable.
 */
enum GapStatus gap_operator_dims(const struct GapOperator *op, size_t *n_plus, size_t *n_minus);

/**
 * `-A` with the two subspaces exchanged, as a new handle.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum GapStatus gap_operator_negate_and_swap(const struct GapOperator *op, struct GapOperator **out);

/**
 * All eigenvalues in ascending order into `values[0..len]`, where `len` must
 * equal the operator dimension.
 *
 * # Safety
 * `op` must be a live handle and `values` must hold `len` doubles.
 */
enum GapStatus gap_operator_spectrum(const struct GapOperator *op, double *values, size_t len);

/**
 * Pauli channel `l` with coupling `nu` on the grid `(r_max, n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GapStatus gap_pauli_channel(double nu,
                                 uint32_t l,
                                 double r_max,
                                 size_t n,
                                 struct GapOperator **out);

/**
 * Radial Dirac channel `kappa` with potential `-nu/r` on the grid `(r_max, n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GapStatus gap_dirac_coulomb_channel(double nu,
                                         int32_t kappa,
                                         double r_max,
                                         size_t n,
                                         struct GapOperator **out);

/**
 * Extreme block eigenvalues together with the declared edges.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum GapStatus gap_profile_compute(const struct GapOperator *op,
                                   double b_minus,
                                   double b_plus,
                                   struct GapProfile *out);

/**
 * Level `k` (1-based) on `side` (0 plus, 1 minus) to tolerance `tol`.
 *
 * # Safety
 * `op` must be a live handle, `profile` readable and `out` writable.
 */
enum GapStatus gap_solve_level(const struct GapOperator *op,
                               const struct GapProfile *profile,
                               size_t k,
                               int32_t side,
                               double tol,
                               struct GapLevel *out);

/**
 * Exact level `n` of the Pauli model on `side`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GapStatus gap_analytic_pauli_level(double nu, uint32_t n, int32_t side, double *out);

/**
 * Exact Dirac-Coulomb bound state with radial quantum number `n_r`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GapStatus gap_analytic_dirac_coulomb_level(double nu,
                                                int32_t kappa,
                                                uint32_t n_r,
                                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAPSPEC_H */
