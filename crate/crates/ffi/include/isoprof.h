#ifndef ISOPROF_H
#define ISOPROF_H

/* Generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define ISOPROF_OK 0

#define ISOPROF_ERR_DOMAIN 1

#define ISOPROF_ERR_NUMERIC 2

#define ISOPROF_ERR_INVALID 3

/**
 * Opaque potential handle.
 */
typedef struct IsoprofPotential IsoprofPotential;

/**
 * Opaque radial-measure handle.
 */
typedef struct IsoprofRadial IsoprofRadial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, as a NUL-terminated
 * string. Valid until the next failing call on the same thread. Never NULL.
 */
const char *isoprof_last_error(void);

/**
 * Create the power potential `phi(x) = (lambda x)^alpha`. Requires
 * `alpha >= 1` and `lambda > 0`.
 */
int isoprof_potential_power(double alpha, double lambda, struct IsoprofPotential **out);

/**
 * Release a potential handle.
 */
void isoprof_potential_free(struct IsoprofPotential *p);

/**
 * Evaluate `phi(x)`.
 */
int isoprof_potential_eval(const struct IsoprofPotential *p, double x, double *out);

/**
 * Evaluate `phi^{-1}(y)` for `y >= 0`.
 */
int isoprof_potential_inverse(const struct IsoprofPotential *p, double y, double *out);

/**
 * Normalize the radial measure in dimension `n >= 1` for the potential.
 * The potential handle stays owned by the caller.
 */
int isoprof_radial_new(unsigned int n,
                       const struct IsoprofPotential *p,
                       struct IsoprofRadial **out);

/**
 * Release a radial-measure handle.
 */
void isoprof_radial_free(struct IsoprofRadial *m);

/**
 * Mode of the radial density.
 */
int isoprof_radial_mode(const struct IsoprofRadial *m, double *out);

/**
 * Tail mass `nu{(r, inf)}` for `r > 0`.
 */
int isoprof_radial_tail(const struct IsoprofRadial *m, double r, double *out);

/**
 * Quantile: the radius with CDF mass `a`, for `a` in (0, 1).
 */
int isoprof_radial_quantile(const struct IsoprofRadial *m, double a, double *out);

/**
 * One-dimensional comparison profile `I_phi(a)`.
 */
int isoprof_profile_iphi(const struct IsoprofPotential *p, double a, double *out);

/**
 * Certified lower bound on the isoperimetric profile of the full measure at
 * mass `a`. `out_valid` receives 1 when every validity condition of the
 * certificate passed, 0 otherwise; the bound value is only meaningful when
 * the certificate is valid.
 */
int isoprof_bound_theorem(unsigned int n,
                          const struct IsoprofPotential *p,
                          double a,
                          double *out_value,
                          int *out_valid);

/**
 * Witness upper bound on the same profile: min of the ball and half-space
 * boundary measures at mass `a`.
 */
int isoprof_witness_upper_bound(unsigned int n,
                                const struct IsoprofPotential *p,
                                double a,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOPROF_H */
