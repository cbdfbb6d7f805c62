#ifndef RRPATH_H
#define RRPATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RrpStatus {
  RRP_STATUS_OK = 0,
  RRP_STATUS_NULL_POINTER = 1,
  /**
   * Bad dimensions, indices, grids, field specs or configuration.
   */
  RRP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Hölder exponent or Hurst index outside (1/3, 1/2].
   */
  RRP_STATUS_INVALID_EXPONENT = 3,
  /**
   * The numerical procedure failed (non-convergence, step underflow, non-finite values).
   */
  RRP_STATUS_NUMERICAL = 4,
  RRP_STATUS_IO = 5,
  /**
   * Output buffer too small; the required length was written where the call allows it.
   */
  RRP_STATUS_BUFFER_TOO_SMALL = 6,
  RRP_STATUS_PANIC = 7,
} RrpStatus;

/**
 * Second-level enhancement built by `rrp_path_lift`.
 */
typedef enum RrpLift {
  RRP_LIFT_GEOMETRIC = 0,
  /**
   * Geometric lift plus `φ_t = −(t/2) Id`.
   */
  RRP_LIFT_ITO = 1,
} RrpLift;

/**
 * Which grid pairs seminorm scans visit.
 */
typedef enum RrpBudget {
  RRP_BUDGET_AUTO = 0,
  RRP_BUDGET_ALL_PAIRS = 1,
  RRP_BUDGET_DYADIC = 2,
} RrpBudget;

/**
 * Opaque reduced rough path.
 */
typedef struct RrpPath RrpPath;

typedef struct RrpNorms {
  double x_alpha;
  double s_2alpha;
  double total;
} RrpNorms;

typedef struct RrpSolveInfo {
  /**
   * `sup_t |Y_t − ξ − ∫₀ᵗ F(Y) d𝕏|`.
   */
  double residual;
  /**
   * Working exponent of the solver.
   */
  double alpha;
  /**
   * Number of accepted windows.
   */
  size_t windows;
} RrpSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rrp_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated, always NUL-terminated
 * when `len > 0`). Returns the full message length including the terminator, 0 if none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null with `len == 0`.
 */
size_t rrp_last_error(char *buf, size_t len);

/**
 * Lifts the sampled path (`points` rows of `dim` values on the increasing grid `times`).
 *
 * # Safety
 * `times` holds `points` values, `values` holds `points * dim`, `out` is writable.
 */
enum RrpStatus rrp_path_lift(const double *times,
                             const double *values,
                             size_t points,
                             size_t dim,
                             double alpha,
                             enum RrpLift kind,
                             struct RrpPath **out);

/**
 * Loads a rough path saved by `rrp_path_save` or the `rrpath lift` command.
 *
 * # Safety
 * `path` is a NUL-terminated string, `out` is writable.
 */
enum RrpStatus rrp_path_load(const char *path, struct RrpPath **out);

/**
 * # Safety
 * `h` is a live handle, `path` a NUL-terminated string.
 */
enum RrpStatus rrp_path_save(const struct RrpPath *h, const char *path);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` came from this library and is not used afterwards.
 */
void rrp_path_free(struct RrpPath *h);

/**
 * Dimension of the driver; 0 for a null handle.
 *
 * # Safety
 * `h` is a live handle or null.
 */
size_t rrp_path_dim(const struct RrpPath *h);

/**
 * Number of grid points; 0 for a null handle.
 *
 * # Safety
 * `h` is a live handle or null.
 */
size_t rrp_path_points(const struct RrpPath *h);

/**
 * Hölder exponent; NaN for a null handle.
 *
 * # Safety
 * `h` is a live handle or null.
 */
double rrp_path_alpha(const struct RrpPath *h);

/**
 * # Safety
 * `h` is a live handle, `out` is writable.
 */
enum RrpStatus rrp_path_norms(const struct RrpPath *h, enum RrpBudget pairs, struct RrpNorms *out);

/**
 * Writes `S_{t_i, t_j}` as a `dim × dim` row-major matrix.
 *
 * # Safety
 * `h` is a live handle, `out` holds `capacity` doubles.
 */
enum RrpStatus rrp_path_second_level(const struct RrpPath *h,
                                     size_t i,
                                     size_t j,
                                     double *out,
                                     size_t capacity);

/**
 * Frobenius norm of `S_ik − S_ij − S_jk − Sym(X_ij ⊗ X_jk)`.
 *
 * # Safety
 * `h` is a live handle, `out` is writable.
 */
enum RrpStatus rrp_path_chen_defect(const struct RrpPath *h,
                                    size_t i,
                                    size_t j,
                                    size_t k,
                                    double *out);

/**
 * Rough integral `t ↦ ∫₀ᵗ F(X) d𝕏` on every grid point. `field` is a field spec such as
 * `"sin"`, or `"driver"` for `∫ ⟨X, dX⟩`. Writes `points × out_dim` values and
 * sets `*out_dim`, also when the buffer is too small.
 *
 * # Safety
 * `h` is a live handle, `field` a NUL-terminated string, `out` holds `capacity` doubles and
 * `out_dim` is writable.
 */
enum RrpStatus rrp_integrate(const struct RrpPath *h,
                             const char *field,
                             double *out,
                             size_t capacity,
                             size_t *out_dim);

/**
 * Solves `dY = F(Y) d𝕏`, `Y_0 = ξ` with default solver settings, writing `points × n`
 * values. `field` is a field spec (`"linear:[[1]]"`, `"sin"`, ...); `info` may be null.
 *
 * # Safety
 * `h` is a live handle, `field` a NUL-terminated string, `xi` holds `n` doubles, `out` holds
 * `capacity` doubles, `info` is writable or null.
 */
enum RrpStatus rrp_solve(const struct RrpPath *h,
                         const char *field,
                         const double *xi,
                         size_t n,
                         double *out,
                         size_t capacity,
                         struct RrpSolveInfo *info);

/**
 * Samples `dim` independent fBm components on the uniform grid of `steps` steps over
 * `[0, horizon]`, writing `(steps + 1) × dim` values.
 *
 * # Safety
 * `out` holds `capacity` doubles.
 */
enum RrpStatus rrp_fbm_sample(double hurst,
                              size_t dim,
                              size_t steps,
                              double horizon,
                              uint64_t seed,
                              double *out,
                              size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RRPATH_H */
