#ifndef CCLOOP_H
#define CCLOOP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Operation selector for `ccl_loop_op`.
 */
typedef enum CclOp {
  CCL_OP_MUL = 0,
  /**
   * `x \ y`
   */
  CCL_OP_LEFT_DIV = 1,
  /**
   * `x / y`
   */
  CCL_OP_RIGHT_DIV = 2,
} CclOp;

/**
 * Result codes.
 */
typedef enum CclStatus {
  CCL_STATUS_OK = 0,
  CCL_STATUS_NULL_POINTER = 1,
  CCL_STATUS_INVALID_UTF8 = 2,
  /**
   * Text did not parse, or a grid is not a loop table.
   */
  CCL_STATUS_INVALID_TABLE = 3,
  /**
   * An element index is outside `0..order`.
   */
  CCL_STATUS_OUT_OF_RANGE = 4,
  /**
   * Identity or search-spec syntax error, or unknown property name.
   */
  CCL_STATUS_SYNTAX = 5,
  /**
   * Order or assignment count above the library's limits.
   */
  CCL_STATUS_TOO_LARGE = 6,
  CCL_STATUS_NOT_SUBLOOP = 7,
  CCL_STATUS_NOT_NORMAL = 8,
  /**
   * The search space was exhausted without a model.
   */
  CCL_STATUS_UNSATISFIABLE = 9,
  /**
   * The search stopped at its time limit without a model.
   */
  CCL_STATUS_NO_MODEL = 10,
  CCL_STATUS_BUFFER_TOO_SMALL = 11,
  /**
   * A panic was caught at the boundary.
   */
  CCL_STATUS_INTERNAL = 99,
} CclStatus;

/**
 * Opaque loop handle.
 */
typedef struct CclLoop CclLoop;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ccl_status_name(enum CclStatus status);

/**
 * Message for the last failure on this thread, NUL-terminated, truncated
 * to `cap` bytes. `*len` receives the untruncated length plus one.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes; `len` must be valid or null.
 */
enum CclStatus ccl_last_error(char *buf, size_t cap, size_t *len);

/**
 * Parses the `.tbl` text format.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be valid.
 */
enum CclStatus ccl_loop_from_tbl(const char *src, struct CclLoop **out);

/**
 * Builds a loop from `n * n` row-major entries.
 *
 * # Safety
 * `entries` must point to `n * n` values; `out` must be valid.
 */
enum CclStatus ccl_loop_from_table(const uint32_t *entries, size_t n, struct CclLoop **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `q` must come from this library and not be used afterwards.
 */
void ccl_loop_free(struct CclLoop *q);

/**
 * Order of the loop, or 0 for a null handle.
 *
 * # Safety
 * `q` must be a valid handle or null.
 */
size_t ccl_loop_order(const struct CclLoop *q);

/**
 * `*out = x op y`.
 *
 * # Safety
 * `q` and `out` must be valid.
 */
enum CclStatus ccl_loop_op(const struct CclLoop *q,
                           enum CclOp op,
                           uint32_t x,
                           uint32_t y,
                           uint32_t *out);

/**
 * Evaluates a named property such as `"cc"`, `"pa"`, `"wip"`, `"extra"`.
 *
 * # Safety
 * `q`, `name` and `out` must be valid.
 */
enum CclStatus ccl_loop_has_property(const struct CclLoop *q, const char *name, bool *out);

/**
 * Checks an identity over all assignments. When it fails, the least
 * counterexample (one element per variable, variables in alphabetical
 * order) is written to `witness` under the array convention; when it
 * holds, `*witness_len` is 0.
 *
 * # Safety
 * `q`, `identity`, `holds` and `witness_len` must be valid; `witness` must
 * be valid for `cap` items.
 */
enum CclStatus ccl_loop_check_identity(const struct CclLoop *q,
                                       const char *identity,
                                       bool *holds,
                                       uint32_t *witness,
                                       size_t cap,
                                       size_t *witness_len);

/**
 * Members of the nucleus, ascending.
 *
 * # Safety
 * `q` and `len` must be valid; `buf` must be valid for `cap` items.
 */
enum CclStatus ccl_loop_nucleus(const struct CclLoop *q, uint32_t *buf, size_t cap, size_t *len);

/**
 * Members of the center, ascending.
 *
 * # Safety
 * As for `ccl_loop_nucleus`.
 */
enum CclStatus ccl_loop_center(const struct CclLoop *q, uint32_t *buf, size_t cap, size_t *len);

/**
 * Serializes to `.tbl` text (NUL-terminated). `*len` receives the byte
 * count including the terminator.
 *
 * # Safety
 * `q` must be valid; `buf` must be valid for `cap` bytes.
 */
enum CclStatus ccl_loop_to_tbl(const struct CclLoop *q, char *buf, size_t cap, size_t *len);

/**
 * Quotient by the normal subloop with the given members.
 *
 * # Safety
 * `q` and `out` must be valid; `members` must point to `count` values.
 */
enum CclStatus ccl_loop_quotient(const struct CclLoop *q,
                                 const uint32_t *members,
                                 size_t count,
                                 struct CclLoop **out);

/**
 * First model of the given order satisfying `require` (comma-separated
 * properties or identities, e.g. `"cc, pa, nonassociative"`).
 * `time_limit_secs` of 0 means no limit.
 *
 * # Safety
 * `require` must be a NUL-terminated string; `out` must be valid.
 */
enum CclStatus ccl_search_first(size_t order,
                                const char *require,
                                uint64_t seed,
                                uint64_t time_limit_secs,
                                struct CclLoop **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCLOOP_H */
