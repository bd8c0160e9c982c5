#ifndef FFBUNDLE_H
#define FFBUNDLE_H

#include <stdbool.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum FfbStatus {
  FFB_STATUS_OK = 0,
  FFB_STATUS_NULL_POINTER = 1,
  FFB_STATUS_INVALID_UTF8 = 2,
  FFB_STATUS_PARSE = 3,
  // An input violates a precondition; for triples, the message names the condition.
  FFB_STATUS_PRECONDITION = 4,
  FFB_STATUS_UNDEFINED = 5,
  FFB_STATUS_UNSUPPORTED = 6,
  // A result does not fit in a 64-bit integer.
  FFB_STATUS_OVERFLOW = 7,
  FFB_STATUS_INTERNAL = 8,
  FFB_STATUS_PANIC = 9,
} FfbStatus;

// Opaque bundle handle.
typedef struct FfbBundle FfbBundle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread; empty if none.
// The pointer stays valid until the next failing call on the same thread.
const char *ffb_last_error(void);

// Parses the text form, e.g. `"3/2:2,0:1,-1"`; `"0"` is the zero bundle.
//
// # Safety
// `text` must be a valid nul-terminated string; `out` must be writable.
enum FfbStatus ffb_bundle_parse(const char *text, struct FfbBundle **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `b` must come from this library and not be used afterwards.
void ffb_bundle_free(struct FfbBundle *b);

// Canonical text form; release with [`ffb_string_free`].
//
// # Safety
// `b` must be a live handle; `out` must be writable.
enum FfbStatus ffb_bundle_to_string(const struct FfbBundle *b, char **out);

// JSON form `{"summands":[{"slope":"3/2","mult":2}]}`; release with [`ffb_string_free`].
//
// # Safety
// `b` must be a live handle; `out` must be writable.
enum FfbStatus ffb_bundle_to_json(const struct FfbBundle *b, char **out);

// # Safety
// `s` must come from this library, or be null.
void ffb_string_free(char *s);

// # Safety
// `b` must be a live handle; `out` must be writable.
enum FfbStatus ffb_bundle_rank(const struct FfbBundle *b, int64_t *out);

// # Safety
// `b` must be a live handle; `out` must be writable.
enum FfbStatus ffb_bundle_degree(const struct FfbBundle *b, int64_t *out);

// # Safety
// `b` must be a live handle; `out` must be writable.
enum FfbStatus ffb_bundle_dual(const struct FfbBundle *b, struct FfbBundle **out);

// # Safety
// `a`, `b` must be live handles; `out` must be writable.
enum FfbStatus ffb_bundle_direct_sum(const struct FfbBundle *a,
                                     const struct FfbBundle *b,
                                     struct FfbBundle **out);

// Whether `e` embeds into `f`.
//
// # Safety
// `e`, `f` must be live handles; `out` must be writable.
enum FfbStatus ffb_is_subbundle(const struct FfbBundle *e, const struct FfbBundle *f, bool *out);

// Whether `f` slopewise dominates `e`.
//
// # Safety
// `f`, `e` must be live handles; `out` must be writable.
enum FfbStatus ffb_slopewise_dominates(const struct FfbBundle *f,
                                       const struct FfbBundle *e,
                                       bool *out);

// Whether `q` is a quotient of `e`.
//
// # Safety
// `q`, `e` must be live handles; `out` must be writable.
enum FfbStatus ffb_is_quotient(const struct FfbBundle *q, const struct FfbBundle *e, bool *out);

// # Safety
// `e`, `f` must be live handles; `out` must be writable.
enum FfbStatus ffb_dim_hom(const struct FfbBundle *e, const struct FfbBundle *f, int64_t *out);

// # Safety
// `e`, `f`, `q` must be live handles; `out` must be writable.
enum FfbStatus ffb_stratum_dim(const struct FfbBundle *e,
                               const struct FfbBundle *f,
                               const struct FfbBundle *q,
                               int64_t *out);

// `c_{E,F}(Q)`.
//
// # Safety
// `e`, `f`, `q` must be live handles; `out` must be writable.
enum FfbStatus ffb_c_value(const struct FfbBundle *e,
                           const struct FfbBundle *f,
                           const struct FfbBundle *q,
                           int64_t *out);

// The degenerating sequence of a reduced triple as JSON with keys `chain`,
// `steps`, `c` and `r`; release with [`ffb_string_free`].
//
// # Safety
// `e`, `f`, `q` must be live handles; `out` must be writable.
enum FfbStatus ffb_trace_json(const struct FfbBundle *e,
                              const struct FfbBundle *f,
                              const struct FfbBundle *q,
                              char **out);

// Library version, static storage.
const char *ffb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFBUNDLE_H */
