#ifndef MODSCHATTEN_H
#define MODSCHATTEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_INVALID_ARGUMENT = 2,
  MS_STATUS_DIMENSION_MISMATCH = 3,
  MS_STATUS_EXPONENT_RELATION = 4,
  MS_STATUS_WEIGHT_CONDITION = 5,
  MS_STATUS_FRAME_CONDITION = 6,
  MS_STATUS_NO_CONVERGENCE = 7,
  MS_STATUS_IO = 8,
  MS_STATUS_PARSE = 9,
  MS_STATUS_PANIC = 10,
} MsStatus;

// Gabor system with its canonical dual window.
typedef struct MsGabor MsGabor;

// Square matrix on the lattice `{0, ..., n-1}`.
typedef struct MsMatrix MsMatrix;

// Phase-space symbol on the `n x n` cyclic grid.
typedef struct MsSymbol MsSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ms_version(void);

// Copies the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `cap - 1` bytes) and returns its full length in bytes.
// Pass a null `buf` to query the length.
size_t ms_last_error_message(char *buf, size_t cap);

// Builds an `n x n` matrix from `n * n` row-major complex entries.
enum MsStatus ms_matrix_new(size_t n, const double *entries, struct MsMatrix **out);

void ms_matrix_free(struct MsMatrix *m);

// Side length of the matrix, 0 for a null handle.
size_t ms_matrix_dim(const struct MsMatrix *m);

// Copies the entries row-major into `out`, which holds `len` complex values.
enum MsStatus ms_matrix_entries(const struct MsMatrix *m, double *out, size_t len);

// `‖A‖_{U^{p,q}}` with the polynomial pair weight `⟨(j, k)⟩^s`.
// Exponents may be `INFINITY`.
enum MsStatus ms_matrix_u_norm(const struct MsMatrix *m, double p, double q, double s, double *out);

// Schatten `p`-quasi-norm of the matrix.
enum MsStatus ms_matrix_schatten_norm(const struct MsMatrix *m, double p, double *out);

// Splits `A0 = A1 A2` with unit weights; the diagonal factor is `A1`, or
// `A2` when `right` is set. Requires `1/p0 = 1/p1 + 1/p2`.
enum MsStatus ms_matrix_factorize(const struct MsMatrix *m,
                                  double p0,
                                  double p1,
                                  double p2,
                                  bool right,
                                  struct MsMatrix **a1,
                                  struct MsMatrix **a2);

// Builds a symbol from `n * n` complex values, position index major.
enum MsStatus ms_symbol_new(size_t n, const double *values, struct MsSymbol **out);

void ms_symbol_free(struct MsSymbol *s);

// Grid size `n` of the symbol, 0 for a null handle.
size_t ms_symbol_dim(const struct MsSymbol *s);

enum MsStatus ms_symbol_values(const struct MsSymbol *s, double *out, size_t len);

// The `t`-quantization `Op_t(a)` as an `n x n` matrix.
enum MsStatus ms_op_t(const struct MsSymbol *s, double t, struct MsMatrix **out);

// Cross `t`-Wigner distribution of two length-`n` signals.
enum MsStatus ms_wigner_t(const double *f1,
                          const double *f2,
                          size_t n,
                          double t,
                          struct MsSymbol **out);

// Gabor system with window `g` of length `n`, time step `a` and frequency
// step `b`, together with its canonical dual window.
enum MsStatus ms_gabor_new(const double *window,
                           size_t n,
                           size_t a,
                           size_t b,
                           struct MsGabor **out);

void ms_gabor_free(struct MsGabor *g);

// Copies the canonical dual window into `out` (`len` complex values).
enum MsStatus ms_gabor_dual(const struct MsGabor *g, double *out, size_t len);

// Analyses `f` with the window and synthesises with the dual. Writes the
// result to `out` and the relative residual to `residual` when non-null.
enum MsStatus ms_gabor_reconstruct(const struct MsGabor *g,
                                   const double *f,
                                   size_t n,
                                   double *out,
                                   double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODSCHATTEN_H */
