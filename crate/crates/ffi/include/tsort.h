/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef TSORT_H
#define TSORT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsortStatus {
  TSORT_STATUS_OK = 0,
  TSORT_STATUS_NULL_POINTER = 1,
  TSORT_STATUS_INVALID_ARGUMENT = 2,
  TSORT_STATUS_CAPACITY_OVERFLOW = 3,
  TSORT_STATUS_INVARIANT_VIOLATION = 4,
  TSORT_STATUS_ARITHMETIC_OVERFLOW = 5,
  TSORT_STATUS_BUFFER_TOO_SMALL = 6,
  TSORT_STATUS_PANIC = 7,
} TsortStatus;

typedef enum TsortPolicy {
  TSORT_POLICY_FIXED = 0,
  TSORT_POLICY_LEGACY = 1,
} TsortPolicy;

/**
 * Opaque run stack.
 */
typedef struct TsortStack TsortStack;

typedef struct TsortStats {
  size_t max_stack_depth;
  uint64_t comparisons;
  size_t runs;
  size_t merges;
} TsortStats;

/**
 * A key with the caller's tag; sorting is by key only and stable.
 */
typedef struct TsortElement {
  int64_t key;
  uint64_t tag;
} TsortElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Sorts `len` keys in place. `stats` may be null.
 *
 * # Safety
 * `keys` must be valid for `len` reads and writes (it may be null when
 * `len` is 0); `stats` must be null or writable.
 */
enum TsortStatus tsort_sort_i64(int64_t *keys, size_t len, struct TsortStats *stats);

/**
 * Stably sorts `len` elements in place by key. With `check_invariants`
 * the run-stack invariant is verified after every stack mutation.
 *
 * # Safety
 * As for [`tsort_sort_i64`].
 */
enum TsortStatus tsort_sort_elements(struct TsortElement *elems,
                                     size_t len,
                                     bool check_invariants,
                                     struct TsortStats *stats);

/**
 * Creates an empty stack sized for an array of `n` elements.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsortStatus tsort_stack_new(uint64_t n, struct TsortStack **out);

/**
 * Releases a stack. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle from [`tsort_stack_new`] not yet freed.
 */
void tsort_stack_free(struct TsortStack *s);

/**
 * Pushes the run `[base, base + len)`.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum TsortStatus tsort_stack_push(struct TsortStack *s, size_t base, size_t len);

/**
 * Runs a collapse rule on the lengths (merging adds lengths).
 *
 * # Safety
 * `s` must be a live handle.
 */
enum TsortStatus tsort_stack_collapse(struct TsortStack *s, enum TsortPolicy policy);

/**
 * Merges the stack down to one run.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum TsortStatus tsort_stack_force_collapse(struct TsortStack *s);

/**
 * Number of live runs.
 *
 * # Safety
 * `s` must be a live handle; `out` writable.
 */
enum TsortStatus tsort_stack_size(const struct TsortStack *s, size_t *out);

/**
 * Copies the live run lengths, bottom first, into `out` (room for `cap`)
 * and stores the count in `written`. Fails with `BUFFER_TOO_SMALL`,
 * still setting `written`, when `cap` is short.
 *
 * # Safety
 * `s` must be a live handle; `out` valid for `cap` writes; `written`
 * writable.
 */
enum TsortStatus tsort_stack_lengths(const struct TsortStack *s,
                                     size_t *out,
                                     size_t cap,
                                     size_t *written);

/**
 * `OK` when the stack satisfies the run-stack invariant,
 * `INVARIANT_VIOLATION` otherwise.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum TsortStatus tsort_stack_check_invariant(const struct TsortStack *s);

/**
 * Largest array length whose run stack can reach depth `l` with minimum
 * run length `u`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsortStatus tsort_safe_bound(uint64_t l, uint64_t u, uint64_t *out);

/**
 * Stack slots allocated for an array of `n` elements.
 */
size_t tsort_required_capacity(uint64_t n);

/**
 * Fibonacci number with `fib(0) = fib(1) = 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsortStatus tsort_fib(uint64_t k, uint64_t *out);

/**
 * Run lengths of the extremal stack of depth `l`, bottom first. Same
 * buffer protocol as [`tsort_stack_lengths`].
 *
 * # Safety
 * `out` valid for `cap` writes; `written` writable.
 */
enum TsortStatus tsort_worst_case(uint64_t l,
                                  uint64_t u,
                                  uint64_t *out,
                                  size_t cap,
                                  size_t *written);

/**
 * Static description of a status code; never null.
 */
const char *tsort_status_str(int32_t code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSORT_H */
