#ifndef UNICRIT_H
#define UNICRIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UcCell {
  UC_CELL_INSIDE = 0,
  UC_CELL_OUTSIDE = 1,
  UC_CELL_UNDECIDED = 2,
} UcCell;

typedef enum UcPlane {
  UC_PLANE_PARAMETER = 0,
  UC_PLANE_DYNAMICAL = 1,
} UcPlane;

/**
 * Outcome of a call. Values 1 to 10 match the command-line exit codes.
 */
typedef enum UcStatus {
  UC_STATUS_OK = 0,
  UC_STATUS_INVALID_INPUT = 1,
  UC_STATUS_NOT_ESCAPING = 2,
  UC_STATUS_BRANCH_AMBIGUITY = 3,
  UC_STATUS_NEWTON_STALL = 4,
  UC_STATUS_RESOLUTION_INSUFFICIENT = 5,
  UC_STATUS_NON_CONVERGENT = 6,
  UC_STATUS_NO_CONVERGENCE = 7,
  UC_STATUS_LOG_DOMAIN = 8,
  UC_STATUS_NUMERIC = 9,
  UC_STATUS_IO = 10,
  UC_STATUS_PANIC = 20,
} UcStatus;

/**
 * A classified raster. Opaque to C.
 */
typedef struct UcRaster UcRaster;

/**
 * A traced ray. Opaque to C.
 */
typedef struct UcRay UcRay;

typedef struct UcComplex {
  double re;
  double im;
} UcComplex;

typedef struct UcHedgehogReport {
  double modulus;
  size_t components;
  size_t crossing_components;
  /**
   * Infinite when no component crosses the annulus.
   */
  double eps_star;
  bool center_in_set;
  bool verdict;
} UcHedgehogReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *uc_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *uc_version(void);

/**
 * Green's function `G_c(z)`.
 */
enum UcStatus uc_green(uint32_t d,
                       struct UcComplex c,
                       struct UcComplex z,
                       double tol,
                       double *out_t);

/**
 * Böttcher coordinate `φ_c(z)`; `out_dphi_dz` may be null.
 */
enum UcStatus uc_bottcher(uint32_t d,
                          struct UcComplex c,
                          struct UcComplex z,
                          double tol,
                          struct UcComplex *out_phi,
                          struct UcComplex *out_dphi_dz);

/**
 * Potential and external angle (in turns) of `z`.
 */
enum UcStatus uc_external_angle(uint32_t d,
                                struct UcComplex c,
                                struct UcComplex z,
                                double tol,
                                double *out_t,
                                double *out_theta);

/**
 * `Φ(c) = φ_c(c)`; `out_dphi_dc` may be null.
 */
enum UcStatus uc_param_bottcher(uint32_t d,
                                struct UcComplex c,
                                double tol,
                                struct UcComplex *out_phi,
                                struct UcComplex *out_dphi_dc);

/**
 * The transversality sum `T(c)`; `out_n_terms` may be null.
 */
enum UcStatus uc_transversality(uint32_t d,
                                struct UcComplex c,
                                double tol,
                                size_t max_terms,
                                struct UcComplex *out_value,
                                size_t *out_n_terms);

/**
 * `D_cΦ / ∂_zφ_c` against `T(c)` with their relative difference.
 */
enum UcStatus uc_verify_identity(uint32_t d,
                                 struct UcComplex c,
                                 double tol,
                                 struct UcComplex *out_lhs,
                                 struct UcComplex *out_rhs,
                                 double *out_rel_err);

/**
 * Lyapunov exponent of the critical value over `n` steps.
 */
enum UcStatus uc_lyapunov(uint32_t d, struct UcComplex c, size_t n, double *out_lambda);

/**
 * Traces a ray at the angle `"p/q"` from potential `t_start` down to `t_min`.
 * `c` is ignored in the parameter plane; `anchor` may be null. After a
 * stall the partial ray is still returned through `out_ray` together with
 * `UC_STATUS_NEWTON_STALL`.
 */
enum UcStatus uc_ray_trace(enum UcPlane plane,
                           uint32_t d,
                           struct UcComplex c,
                           const char *angle,
                           double t_start,
                           double t_min,
                           uint32_t steps_per_halving,
                           const struct UcComplex *anchor,
                           struct UcRay **out_ray);

/**
 * Number of samples; 0 for a null handle.
 */
size_t uc_ray_len(const struct UcRay *ray);

/**
 * Potential and absolute position of sample `i` (outermost first).
 */
enum UcStatus uc_ray_sample(const struct UcRay *ray,
                            size_t i,
                            double *out_t,
                            struct UcComplex *out_z);

/**
 * Extrapolated landing point and its error bound.
 */
enum UcStatus uc_ray_landing(const struct UcRay *ray,
                             struct UcComplex *out_point,
                             double *out_error_bound);

/**
 * Releases a ray handle; null is ignored.
 */
void uc_ray_free(struct UcRay *ray);

/**
 * Escape-time raster of a square region with `n x n` cells.
 */
enum UcStatus uc_raster_escape(enum UcPlane plane,
                               uint32_t d,
                               struct UcComplex c,
                               struct UcComplex center,
                               double half_width,
                               size_t n,
                               size_t maxit,
                               struct UcRaster **out_raster);

/**
 * Synthetic fixture on `[-1, 1]^2`: `"spikes:K"`, `"empty-annulus"`,
 * `"half-plane"`, `"segment"` or `"empty"`. Spikes and the empty annulus
 * use an inner radius of 0.4.
 */
enum UcStatus uc_raster_synthetic(const char *name, size_t n, struct UcRaster **out_raster);

enum UcStatus uc_raster_dims(const struct UcRaster *raster, size_t *out_nx, size_t *out_ny);

/**
 * Class of cell `(i, j)`, row 0 at the top; `out_escape` may be null.
 */
enum UcStatus uc_raster_cell(const struct UcRaster *raster,
                             size_t i,
                             size_t j,
                             enum UcCell *out_cell,
                             uint32_t *out_escape);

/**
 * Copies the PGM encoding into `buf` when it fits; `out_len` always
 * receives the required size.
 */
enum UcStatus uc_raster_pgm(const struct UcRaster *raster,
                            uint8_t *buf,
                            size_t cap,
                            size_t *out_len);

enum UcStatus uc_hedgehog(const struct UcRaster *raster,
                          struct UcComplex center,
                          double r_in,
                          double r_out,
                          double m_req,
                          double eps_req,
                          struct UcHedgehogReport *out_report);

/**
 * Releases a raster handle; null is ignored.
 */
void uc_raster_free(struct UcRaster *raster);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNICRIT_H */
