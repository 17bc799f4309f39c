#ifndef LANE_EMDEN_H
#define LANE_EMDEN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LeStatus {
  LE_STATUS_OK = 0,
  LE_STATUS_NULL_POINTER = 1,
  LE_STATUS_DOMAIN = 2,
  LE_STATUS_POLE = 3,
  LE_STATUS_DEGENERATE_MODULUS = 4,
  LE_STATUS_DEGENERATE_LATTICE = 5,
  LE_STATUS_NO_CONVERGENCE = 6,
  LE_STATUS_OUT_OF_REGIME = 7,
  LE_STATUS_NO_REAL_SOLUTION = 8,
  LE_STATUS_UNREACHABLE = 9,
  LE_STATUS_INTEGRATION_FAILURE = 10,
  LE_STATUS_PANIC = 99,
} LeStatus;

typedef enum LeRegime {
  LE_REGIME_NO_REAL_SOLUTION = 0,
  LE_REGIME_SINGULAR_FIXED_POINT = 1,
  LE_REGIME_DC_FAMILY = 2,
  LE_REGIME_SCHUSTER = 3,
  LE_REGIME_SC_FAMILY = 4,
  LE_REGIME_SRIVASTAVA = 5,
  LE_REGIME_WEIERSTRASS_FAMILY = 6,
} LeRegime;

typedef enum LeBranch {
  LE_BRANCH_PLUS = 1,
  LE_BRANCH_MINUS = -1,
} LeBranch;

// Opaque solution handle.
typedef struct LeSolution LeSolution;

// Roots `a < b < c` of the cubic in `z²`, for `-2 < C < 2`.
typedef struct LeRoots {
  double a;
  double b;
  double c;
} LeRoots;

typedef struct LeSample {
  double xi;
  double theta;
  double dtheta;
} LeSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until
// the next failing call on the same thread.
const char *le_last_error(void);

// Static, NUL-terminated name of an [`LeStatus`] value; "unknown" for
// anything else.
const char *le_status_name(int32_t status);

// Library version, NUL-terminated.
const char *le_version(void);

// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_classify(double c, enum LeRegime *out);

// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_cardano_roots(double c, struct LeRoots *out);

// Real root `f` of `f³ - 3f = C` for `C >= 2`.
//
// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_positive_root(double c, double *out);

// `λ(C, m)`; `parity` (may be NULL) receives the sign `s` in
// `θ(ξ/λ)/sqrt(λ) = s·θ(ξ)`.
//
// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_scaling_lambda(double c, int32_t m, double *out, double *parity);

// `B` such that `2·ξ0·θ(ξ0)² = z0²` on the branch through `ln(Bξ0) = 0`.
//
// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_calibrate_b(double c, double xi0, double z0, double *out);

// Solution for constant `c`, scale `b > 0` and sign `br` (an
// [`LeBranch`] value), in the representation selected by `c`.
//
// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_solution_new(double c, double b, int32_t br, struct LeSolution **out);

// Same as [`le_solution_new`] but always in the ℘ representation
// (`C > 0`, `C != 2`).
//
// # Safety
// Output pointers must be NULL or valid for writes.
enum LeStatus le_solution_new_weierstrass(double c, double b, int32_t br, struct LeSolution **out);

// Releases a handle. NULL is ignored.
//
// # Safety
// `sol` must come from `le_solution_new*` and not have been freed.
void le_solution_free(struct LeSolution *sol);

// # Safety
// `sol` must be NULL or a live handle; `out` must be writable.
enum LeStatus le_solution_eval(const struct LeSolution *sol, double xi, struct LeSample *out);

// Evaluates at `n` radii. Stops at the first failure; `done` (may be NULL)
// receives the number of samples written.
//
// # Safety
// `sol` must be NULL or a live handle; `xi` must point to `n` readable and
// `out` to `n` writable elements.
enum LeStatus le_solution_eval_many(const struct LeSolution *sol,
                                    const double *xi,
                                    size_t n,
                                    struct LeSample *out,
                                    size_t *done);

// # Safety
// `sol` must be NULL or a live handle.
enum LeStatus le_solution_regime(const struct LeSolution *sol, enum LeRegime *out);

// Shift in `ln ξ` mapping the solution onto `±` itself; `OutOfRegime` for
// the singular and Schuster solutions, which have none.
//
// # Safety
// `sol` must be NULL or a live handle.
enum LeStatus le_solution_log_period(const struct LeSolution *sol, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LANE_EMDEN_H */
