#ifndef POINTHOLE_H
#define POINTHOLE_H

/* generated by cbindgen from the pointhole-capi crate; do not edit */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum PhStatus {
  PH_STATUS_OK = 0,
  PH_STATUS_NULL_POINTER = 1,
  PH_STATUS_INVALID_ARGUMENT = 2,
  PH_STATUS_NUMERICAL_FAILURE = 3,
  PH_STATUS_GEOMETRY_ERROR = 4,
  PH_STATUS_IO_ERROR = 5,
  PH_STATUS_PANIC = 6,
} PhStatus;

// Opaque defect-function handle.
typedef struct PhDefect PhDefect;

// Opaque limit-operator handle.
typedef struct PhLimitOp PhLimitOp;

// One labelled eigenvalue of the limit operator on the disc.
typedef struct PhEigenvalue {
  uint32_t m;
  uint32_t index;
  double lambda;
} PhEigenvalue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread; valid until the next failing call.
const char *ph_last_error_message(void);

// Library version string (static storage).
const char *ph_version(void);

// Create the whole-plane defect function G(r) = -K0(sqrt(c1) r).
//
// # Safety
// `out` must point to writable storage for one pointer.
enum PhStatus ph_defect_plane_new(double c1, struct PhDefect **out);

// Create the Dirichlet-disc defect function.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum PhStatus ph_defect_disc_new(double c1, double radius, struct PhDefect **out);

// The constant term a of the defect function at the interaction point.
//
// # Safety
// `d` must be a live handle; `out` writable.
enum PhStatus ph_defect_constant(const struct PhDefect *d, double *out);

// ||G||^2 over the working domain.
//
// # Safety
// `d` must be a live handle; `out` writable.
enum PhStatus ph_defect_norm_sq(const struct PhDefect *d, double *out);

// Evaluate the radial profile G(r).
//
// # Safety
// `d` must be a live handle; `out` writable.
enum PhStatus ph_defect_eval_radial(const struct PhDefect *d, double r, double *out);

// Destroy a defect handle. Passing null is a no-op.
//
// # Safety
// `d` must be a handle from this library, not yet freed.
void ph_defect_free(struct PhDefect *d);

// Coupling constants of the disc-hole benchmark: K = 2 pi (ln b - b alpha1),
// beta = b alpha1 - ln b, and the defect constant a for the given base.
//
// # Safety
// The out pointers must be writable or null (skipped when null).
enum PhStatus ph_coupling_disc_hole(double b,
                                    double alpha1,
                                    double c1,
                                    double *out_k,
                                    double *out_beta,
                                    double *out_a);

// Create the limit operator on the centered disc with explicit beta.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum PhStatus ph_limit_op_disc_new(double radius, double c1, double beta, struct PhLimitOp **out);

// Destroy a limit-operator handle. Passing null is a no-op.
//
// # Safety
// `op` must be a handle from this library, not yet freed.
void ph_limit_op_free(struct PhLimitOp *op);

// Eigenvalues of the limit operator in [lo, hi], written into the caller's
// buffer; `out_len` receives the number found (truncated to `capacity`).
//
// # Safety
// `buf` must hold `capacity` entries; `op` live; `out_len` writable.
enum PhStatus ph_limit_eigs_disc(const struct PhLimitOp *op,
                                 double lo,
                                 double hi,
                                 struct PhEigenvalue *buf,
                                 size_t capacity,
                                 size_t *out_len);

// The explicit benchmark quotient h_eps/c_eps and its leading asymptotic
// term at one eps.
//
// # Safety
// Out pointers must be writable or null.
enum PhStatus ph_benchmark_quotient(double b,
                                    double alpha1,
                                    double lambda,
                                    double v0_amp,
                                    double v0_width,
                                    double eps,
                                    double *out_quotient,
                                    double *out_leading);

// Run the resolvent-error sweep for the disc-hole benchmark over
// eps = 10^{-start_exp} .. 10^{-end_exp} and write the CSV to `path`.
// Returns the fitted exponents through the out pointers.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string; out pointers writable or
// null.
enum PhStatus ph_resolvent_sweep_csv(double b,
                                     double alpha1,
                                     double lambda,
                                     double v0_amp,
                                     double v0_width,
                                     uint32_t start_exp,
                                     uint32_t end_exp,
                                     const char *path,
                                     double *out_p_l2,
                                     double *out_p_grad);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POINTHOLE_H */
