#ifndef GIBBSLAB_H
#define GIBBSLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes, aligned with the command-line exit codes.
typedef enum GlStatus {
  GL_STATUS_OK = 0,
  // Null pointer, invalid UTF-8 or an unsupported request.
  GL_STATUS_USAGE = 1,
  // Malformed model text, parameter or ε.
  GL_STATUS_PARSE = 2,
  // The model violates a condition the request needs.
  GL_STATUS_CONDITION = 3,
  GL_STATUS_NUMERIC = 4,
  // The output buffer is shorter than the result; the needed length is reported.
  GL_STATUS_BUFFER_TOO_SMALL = 5,
  // An internal panic was caught at the boundary.
  GL_STATUS_INTERNAL = 6,
} GlStatus;

// Opaque model handle.
typedef struct GlModel GlModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse model text. On success `*out` owns a handle for `gl_model_free`.
//
// # Safety
// `src` must be a NUL-terminated string and `out` a valid pointer.
enum GlStatus gl_model_parse(const char *src, struct GlModel **out);

// Release a handle. Null is ignored.
//
// # Safety
// `m` must come from `gl_model_parse` and not be used afterwards.
void gl_model_free(struct GlModel *m);

// Set a declared parameter to an expression without ε, e.g. `"7/9"`.
//
// # Safety
// `m` must be a live handle, `name` and `value` NUL-terminated strings.
enum GlStatus gl_model_set_param(struct GlModel *m, const char *name, const char *value);

// Number of states.
//
// # Safety
// `m` must be a live handle and `out` valid.
enum GlStatus gl_model_dim(const struct GlModel *m, size_t *out);

// Number of transitive components of B (entries of `gl_marginals`) and of
// maximal ones (entries of `gl_deltas`).
//
// # Safety
// `m` must be a live handle; either output pointer may be null.
enum GlStatus gl_model_components(const struct GlModel *m, size_t *transitive, size_t *maximal);

// Perron root of the full weighted matrix at ε.
//
// # Safety
// `m` must be a live handle and `out` valid.
enum GlStatus gl_lambda_full(const struct GlModel *m, double eps, double *out);

// Pressure log λ(ε).
//
// # Safety
// `m` must be a live handle and `out` valid.
enum GlStatus gl_pressure(const struct GlModel *m, double eps, double *out);

// Gibbs mass of each transitive component of B, in decomposition order.
//
// # Safety
// `m` must be a live handle, `out` must hold `cap` doubles, `len` valid.
enum GlStatus gl_marginals(const struct GlModel *m,
                           double eps,
                           double *out,
                           size_t cap,
                           size_t *len);

// δ weights of the maximal components (one, two, three or four of them).
//
// # Safety
// `m` must be a live handle, `out` must hold `cap` doubles, `len` valid.
enum GlStatus gl_deltas(const struct GlModel *m, double eps, double *out, size_t cap, size_t *len);

// Entropy of the Gibbs measure at ε.
//
// # Safety
// `m` must be a live handle and `out` valid.
enum GlStatus gl_entropy(const struct GlModel *m, double eps, double *out);

// Copy the last error message of this thread as a NUL-terminated string.
// Returns the message length without the terminator; the copy is truncated
// to `cap − 1` bytes. A null `buf` only queries the length.
//
// # Safety
// `buf` must hold `cap` bytes or be null.
size_t gl_last_error(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIBBSLAB_H */
