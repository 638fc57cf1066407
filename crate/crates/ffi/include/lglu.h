#ifndef LGLU_H
#define LGLU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LgluStatus {
  LGLU_STATUS_OK = 0,
  LGLU_STATUS_NULL_POINTER = 1,
  LGLU_STATUS_INVALID_ARGUMENT = 2,
  LGLU_STATUS_CONFIG = 3,
  LGLU_STATUS_PRECONDITION = 4,
  LGLU_STATUS_CAPACITY = 5,
  LGLU_STATUS_INFEASIBLE = 6,
  LGLU_STATUS_NOT_MEMBER = 7,
  LGLU_STATUS_NOT_ENUMERATED = 8,
  LGLU_STATUS_INTERNAL = 9,
  LGLU_STATUS_PANIC = 10,
} LgluStatus;

// Opaque handle to an instance and, once enumerated, its multiplication table.
typedef struct LgluInstance LgluInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates the instance with `U` spanned by the first `r` standard vectors.
//
// # Safety
// `out_handle` must be a valid pointer; the handle written there is owned by the
// caller and released with [`lglu_instance_free`].
enum LgluStatus lglu_instance_new(uint32_t p, size_t n, size_t r, struct LgluInstance **out_handle);

// Creates an instance with `U` spanned by `r` rows of length `n`, given
// row-major in `rows` (`r*n` bytes).
//
// # Safety
// `rows` must point to `r*n` readable bytes and `out_handle` must be valid.
enum LgluStatus lglu_instance_with_basis(uint32_t p,
                                         size_t n,
                                         size_t r,
                                         const uint8_t *rows,
                                         struct LgluInstance **out_handle);

// Releases a handle. Null is ignored.
//
// # Safety
// `handle` must come from this library and not be used afterwards.
void lglu_instance_free(struct LgluInstance *handle);

// Dimensions `n` of the space and `r` of `U`.
//
// # Safety
// Pointers must be valid.
enum LgluStatus lglu_instance_dim(const struct LgluInstance *handle, size_t *out_n, size_t *out_r);

// `|GL_r(p)| * p^(n(n-r))`, or `LGLU_STATUS_CAPACITY` if it overflows 64 bits.
//
// # Safety
// Pointers must be valid.
enum LgluStatus lglu_instance_order(const struct LgluInstance *handle, uint64_t *out_order);

// Number of complements of `U`, `p^(r(n-r))`.
//
// # Safety
// Pointers must be valid.
enum LgluStatus lglu_instance_complement_count(const struct LgluInstance *handle,
                                               uint64_t *out_count);

// Builds the multiplication table, refusing orders above `cap`.
//
// # Safety
// `handle` must be valid and not shared with another thread during the call.
enum LgluStatus lglu_instance_enumerate(struct LgluInstance *handle, size_t cap);

// Whether the `n*n` matrix maps `U` onto itself.
//
// # Safety
// `entries` must point to `len` readable bytes.
enum LgluStatus lglu_instance_is_member(const struct LgluInstance *handle,
                                        const uint8_t *entries,
                                        size_t len,
                                        bool *out_member);

// `dim(image) - r` of a member.
//
// # Safety
// `entries` must point to `len` readable bytes.
enum LgluStatus lglu_instance_codim(const struct LgluInstance *handle,
                                    const uint8_t *entries,
                                    size_t len,
                                    size_t *out_codim);

// Size of `J(k)`, the members of codimension `k`. Needs an enumerated instance.
//
// # Safety
// Pointers must be valid.
enum LgluStatus lglu_instance_j_class_size(const struct LgluInstance *handle,
                                           size_t k,
                                           size_t *out_size);

// Number of minimal idempotents. Needs an enumerated instance.
//
// # Safety
// Pointers must be valid.
enum LgluStatus lglu_instance_minimal_idempotent_count(const struct LgluInstance *handle,
                                                       size_t *out_count);

// Writes `b` with `a b a = a` and `b a b = b` into `out_entries` (`n*n` bytes).
//
// # Safety
// `entries` must hold `len` bytes, `out_entries` room for `n*n`.
enum LgluStatus lglu_regular_witness(const struct LgluInstance *handle,
                                     const uint8_t *entries,
                                     size_t len,
                                     uint8_t *out_entries);

// Writes `l`, `m` with `l b m = a`. Fails with `LGLU_STATUS_INFEASIBLE`
// when `codim(a) > codim(b)`.
//
// # Safety
// `a` and `b` must hold `len` bytes each, the outputs room for `n*n` each.
enum LgluStatus lglu_factor_through(const struct LgluInstance *handle,
                                    const uint8_t *a,
                                    const uint8_t *b,
                                    size_t len,
                                    uint8_t *out_left,
                                    uint8_t *out_right);

// Structural summary as a JSON string; free it with [`lglu_string_free`].
//
// # Safety
// Pointers must be valid.
enum LgluStatus lglu_report_json(const struct LgluInstance *handle,
                                 size_t cap,
                                 size_t rank_cap,
                                 char **out_json);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void lglu_string_free(char *s);

// Message for the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *lglu_last_error_message(void);

// Static name of a status code, such as `"infeasible"`.
const char *lglu_status_name(enum LgluStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LGLU_H */
