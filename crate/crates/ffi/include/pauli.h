#ifndef PAULI_H
#define PAULI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PauliStatus {
  PAULI_STATUS_OK = 0,
  PAULI_STATUS_NULL_POINTER = 1,
  PAULI_STATUS_INVALID_ARGUMENT = 2,
  PAULI_STATUS_NUMERICAL = 3,
  PAULI_STATUS_BUFFER_SIZE = 4,
  PAULI_STATUS_PANIC = 5,
} PauliStatus;

typedef enum PauliScheme {
  PAULI_SCHEME_SPLIT_STEP = 0,
  PAULI_SCHEME_KRYLOV = 1,
} PauliScheme;

typedef enum PauliRep {
  PAULI_REP_BOTH = 0,
  PAULI_REP_ORIGINAL = 1,
  PAULI_REP_CONVENIENT = 2,
} PauliRep;

// A uniform periodic grid.
typedef struct PauliGrid PauliGrid;

// A potential preset together with the particle charge and mass.
typedef struct PauliPotential PauliPotential;

// A two-component spinor field on a grid.
typedef struct PauliSpinor PauliSpinor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after a
// successful call. Valid until the next call on the same thread.
const char *pauli_last_error(void);

// Library version as a static NUL-terminated string.
const char *pauli_version(void);

// Grid with `n[i]` points (powers of two, at least 8) spanning `extent[i]`,
// centred on the origin, for `dim` in 1..=3.
//
// # Safety
// `n` and `extent` must point to `dim` readable values; `out` must be
// writable.
enum PauliStatus pauli_grid_new(size_t dim,
                                const size_t *n,
                                const double *extent,
                                struct PauliGrid **out);

// # Safety
// `grid` must come from `pauli_grid_new` and not be used afterwards.
void pauli_grid_free(struct PauliGrid *grid);

// Number of grid points, or 0 for a null handle.
//
// # Safety
// `grid` must be null or a live handle.
size_t pauli_grid_len(const struct PauliGrid *grid);

// Potential preset by name (`zero`, `landau`, `symmetric`, `uniform_e`,
// `harmonic`) with `count` named parameters, for a particle of charge `q`
// and unit mass.
//
// # Safety
// `name` must be a NUL-terminated string; `keys` and `values` must hold
// `count` entries (either may be null when `count` is 0); `out` must be
// writable.
enum PauliStatus pauli_potential_preset(const char *name,
                                        const char *const *keys,
                                        const double *values,
                                        size_t count,
                                        double q,
                                        struct PauliPotential **out);

// # Safety
// `p` must come from `pauli_potential_preset` and not be used afterwards.
void pauli_potential_free(struct PauliPotential *p);

// Normalized Gaussian packet. `center`, `width` and `momentum` hold three
// values each (entries for inactive axes are ignored); `spinor` holds
// `re0, im0, re1, im1`.
//
// # Safety
// All pointers must be valid for the stated lengths; `out` must be
// writable.
enum PauliStatus pauli_spinor_gaussian(const struct PauliGrid *grid,
                                       const double *center,
                                       const double *width,
                                       const double *momentum,
                                       const double *spinor,
                                       struct PauliSpinor **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void pauli_spinor_free(struct PauliSpinor *s);

// `Σ|ψ|² h^dim` to the power one half.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum PauliStatus pauli_spinor_norm(const struct PauliSpinor *s, double *out);

// Spin expectation `⟨S⟩` into `out[0..3]`.
//
// # Safety
// `s` must be a live handle and `out` writable for three values.
enum PauliStatus pauli_spinor_spin(const struct PauliSpinor *s, double *out);

// Copies the samples into `out`, which must hold `4 * pauli_grid_len`
// doubles.
//
// # Safety
// `s` must be a live handle and `out` writable for `len` values.
enum PauliStatus pauli_spinor_read(const struct PauliSpinor *s, double *out, size_t len);

// Propagates `s` in place from `t0` to `t1`. `t1 - t0` must be a whole
// number of steps `dt`; `krylov_dim` and `tol` are ignored for split-step.
//
// # Safety
// `s` and `p` must be live handles.
enum PauliStatus pauli_evolve(struct PauliSpinor *s,
                              const struct PauliPotential *p,
                              enum PauliScheme scheme,
                              double dt,
                              double t0,
                              double t1,
                              size_t krylov_dim,
                              double tol);

// Convective, gauge, spin and total currents at time `t`. Each non-null
// output must hold `3 * pauli_grid_len` doubles (x block, y block, z
// block); null outputs are skipped.
//
// # Safety
// `s` and `p` must be live handles; non-null outputs must be writable for
// `len` values.
enum PauliStatus pauli_current_decompose(const struct PauliSpinor *s,
                                         const struct PauliPotential *p,
                                         double t,
                                         double *j_conv,
                                         double *j_gauge,
                                         double *j_spin,
                                         double *j_total,
                                         size_t len);

// Runs the exact-algebra verification suite. Returns `Numerical` when any
// gated condition fails; the counts are written either way.
//
// # Safety
// `passed` and `total` must be writable.
enum PauliStatus pauli_verify(enum PauliRep rep, size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAULI_H */
