#ifndef OQS_H
#define OQS_H

/* Generated by cbindgen from the oqs-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OqsStatus {
  OQS_STATUS_OK = 0,
  OQS_STATUS_NULL_POINTER = 1,
  OQS_STATUS_INVALID_ARGUMENT = 2,
  OQS_STATUS_NUMERICAL = 3,
  OQS_STATUS_PANIC = 4,
} OqsStatus;

// Bath model and temperature.
typedef struct OqsBath OqsBath;

// Superoperator acting on `dim x dim` density matrices.
typedef struct OqsSuperop OqsSuperop;

// System Hamiltonian (diagonal) and coupling operators.
typedef struct OqsSystem OqsSystem;

typedef struct OqsComplex {
  double re;
  double im;
} OqsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *oqs_version(void);

// Message for the most recent failure on this thread; empty after success.
// The pointer stays valid until the next call into the library on this thread.
const char *oqs_last_error(void);

// Creates a system from `dim` level energies and the row-major
// `dim x dim` operator coupled to the bath annihilator. The operator
// coupled to the creator is its adjoint.
//
// # Safety
// `energies` must point to `dim` doubles, `coupling` to `dim * dim` values.
enum OqsStatus oqs_system_new(size_t dim,
                              const double *energies,
                              const struct OqsComplex *coupling,
                              struct OqsSystem **out);

// Two-level system with splitting `omega0`, coupled through `sigma^+`.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum OqsStatus oqs_system_qubit(double omega0, struct OqsSystem **out);

// # Safety
// `sys` must be null or a handle from this library, not yet freed.
void oqs_system_free(struct OqsSystem *sys);

// # Safety
// `sys` must be a live handle; `out` a valid pointer.
enum OqsStatus oqs_system_dim(const struct OqsSystem *sys, size_t *out);

// Ohmic bath `g(w) = eta w exp(-w / cutoff)`. Pass `INFINITY` as `beta`
// for zero temperature.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum OqsStatus oqs_bath_ohmic(double eta, double cutoff, double beta, struct OqsBath **out);

// Bath of `n` discrete modes with couplings `lambdas` and frequencies `omegas`.
//
// # Safety
// `lambdas` and `omegas` must each point to `n` doubles.
enum OqsStatus oqs_bath_discrete(size_t n,
                                 const double *lambdas,
                                 const double *omegas,
                                 double beta,
                                 struct OqsBath **out);

// # Safety
// `bath` must be null or a handle from this library, not yet freed.
void oqs_bath_free(struct OqsBath *bath);

// Frequency-domain correlation function between channels `a` and `b`
// (1 for the annihilator, 2 for the creator).
//
// # Safety
// `bath` must be a live handle; `out` a valid pointer.
enum OqsStatus oqs_bath_correlation_freq(const struct OqsBath *bath,
                                         int a,
                                         int b,
                                         double omega,
                                         double *out);

// Mean occupation `1 / (exp(beta omega) - 1)`; `INFINITY` as `beta` gives 0.
//
// # Safety
// `out` must be a valid pointer.
enum OqsStatus oqs_planck_occupation(double omega, double beta, double *out);

// Constant generator of the quasi-particle (Born-Markov) master equation.
//
// # Safety
// `sys` and `bath` must be live handles; `out` a valid pointer.
enum OqsStatus oqs_qp_generator(const struct OqsSystem *sys,
                                const struct OqsBath *bath,
                                int rwa,
                                struct OqsSuperop **out);

// Dissipator built from Bohr-frequency projections of the coupling.
//
// # Safety
// `sys` and `bath` must be live handles; `out` a valid pointer.
enum OqsStatus oqs_standard_dissipator(const struct OqsSystem *sys,
                                       const struct OqsBath *bath,
                                       struct OqsSuperop **out);

// Dimension `d` of the density matrices the superoperator acts on; its
// matrix is `d^2 x d^2`.
//
// # Safety
// `op` must be a live handle; `out` a valid pointer.
enum OqsStatus oqs_superop_dim(const struct OqsSuperop *op, size_t *out);

// Copies the `d^2 x d^2` matrix, row-major, into `buf` of length `len`.
// Row and column `p * d + q` address the element `rho_pq`.
//
// # Safety
// `op` must be a live handle; `buf` must point to `len` writable values.
enum OqsStatus oqs_superop_copy(const struct OqsSuperop *op, struct OqsComplex *buf, size_t len);

// # Safety
// `op` must be null or a handle from this library, not yet freed.
void oqs_superop_free(struct OqsSuperop *op);

// Unique stationary state of `generator`, written as a row-major `d x d` matrix.
//
// # Safety
// `generator` must be a live handle; `rho` must point to `len` writable values.
enum OqsStatus oqs_steady_state(const struct OqsSuperop *generator,
                                struct OqsComplex *rho,
                                size_t len);

// Number of time points `0, step, ..., stop` produced by `oqs_evolve_markov`.
//
// # Safety
// `out` must be a valid pointer.
enum OqsStatus oqs_time_points(double stop, double step, size_t *out);

// Integrates `d rho / dt = L rho` from `rho0` and writes the state at every
// time point consecutively into `states` (`points * d * d` values).
//
// # Safety
// `generator` must be a live handle; `rho0` must point to `d * d` values and
// `states` to `len` writable values.
enum OqsStatus oqs_evolve_markov(const struct OqsSuperop *generator,
                                 const struct OqsComplex *rho0,
                                 double stop,
                                 double step,
                                 struct OqsComplex *states,
                                 size_t len);

// Non-vanishing qubit kernel elements in the order
// `(++,++), (--,++), (++,--), (--,--), (+-,+-), (-+,-+)`.
//
// # Safety
// `out` must point to 6 writable doubles.
enum OqsStatus oqs_qubit_rates(double omega0, double g0, double n0, double delta, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OQS_H */
