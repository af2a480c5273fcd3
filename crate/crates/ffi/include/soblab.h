/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SOBLAB_H
#define SOBLAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define SOBLAB_YES 1

#define SOBLAB_NO 0

#define SOBLAB_UNSUPPORTED -1

#define SOBLAB_NOT_APPLICABLE 2

#define SOBLAB_FLAG_TARGET_P_MAX 1

#define SOBLAB_FLAG_CRITICAL_CURVE 2

#define SOBLAB_FLAG_HOLDER_LINE 4

#define SOBLAB_TAG_LEN 16

typedef enum SoblabStatus {
  SOBLAB_STATUS_OK = 0,
  SOBLAB_STATUS_INVALID_ARGUMENT = 1,
  SOBLAB_STATUS_NULL_POINTER = 2,
  SOBLAB_STATUS_UNSUPPORTED = 3,
  SOBLAB_STATUS_UNKNOWN_LABEL = 4,
  SOBLAB_STATUS_NOT_CONVERGED = 5,
  SOBLAB_STATUS_INTERNAL = 99,
} SoblabStatus;

typedef enum SoblabDomain {
  SOBLAB_DOMAIN_WHOLE_SPACE = 0,
  SOBLAB_DOMAIN_BOUNDED = 1,
} SoblabDomain;

typedef enum SoblabMode {
  SOBLAB_MODE_CONTINUOUS = 0,
  SOBLAB_MODE_COMPACT = 1,
} SoblabMode;

/**
 * Opaque test function.
 */
typedef struct SoblabFunction SoblabFunction;

/**
 * Index (N, s, p) with s = s_num / s_den and p = p_num / p_den, or p = inf
 * when `p_inf` is set (p_num and p_den are then ignored).
 */
typedef struct SoblabIndex {
  uint32_t dim;
  int64_t s_num;
  int64_t s_den;
  int64_t p_num;
  int64_t p_den;
  bool p_inf;
} SoblabIndex;

typedef struct SoblabVerdict {
  /**
   * SOBLAB_YES, SOBLAB_NO or SOBLAB_UNSUPPORTED.
   */
  int32_t continuous;
  /**
   * As `continuous`, plus SOBLAB_NOT_APPLICABLE on R^N.
   */
  int32_t compact;
  /**
   * Bitmask of SOBLAB_FLAG_*.
   */
  uint32_t boundary_flags;
  bool trivial;
  /**
   * 0 subcritical, 1 critical, 2 supercritical, -1 unsupported.
   */
  int32_t regime;
  /**
   * NUL-terminated tags such as "Thm-1.1" or "none".
   */
  char justification[SOBLAB_TAG_LEN];
  char continuous_tag[SOBLAB_TAG_LEN];
  char compact_tag[SOBLAB_TAG_LEN];
} SoblabVerdict;

typedef struct SoblabNorm {
  double value;
  double error;
  bool converged;
  /**
   * Set when `value` is a grid lower bound (sup-based quantities).
   */
  bool lower_bound;
} SoblabNorm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Classifies W^{s,p} -> W^{s~,p~} on `domain`. `mode` picks which question
 * `justification` answers.
 *
 * # Safety
 * `source`, `target` and `out` must be valid pointers.
 */
enum SoblabStatus soblab_classify(const struct SoblabIndex *source,
                                  const struct SoblabIndex *target,
                                  enum SoblabDomain domain,
                                  enum SoblabMode mode,
                                  struct SoblabVerdict *out);

/**
 * Looks up a built-in corpus function by label.
 *
 * # Safety
 * `label` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SoblabStatus soblab_function_builtin(const char *label, struct SoblabFunction **out);

/**
 * Builds the entry `label` of a JSON corpus manifest.
 *
 * # Safety
 * `manifest_json` and `label` must be NUL-terminated strings and `out` a
 * valid pointer.
 */
enum SoblabStatus soblab_function_from_manifest(const char *manifest_json,
                                                const char *label,
                                                struct SoblabFunction **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `f` must come from a soblab constructor and not be used afterwards.
 */
void soblab_function_free(struct SoblabFunction *f);

/**
 * Space dimension of `f`, or 0 when `f` is null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
uint32_t soblab_function_dim(const struct SoblabFunction *f);

/**
 * Evaluates `f` at the point `x[0..len]`; `len` must equal the dimension.
 *
 * # Safety
 * `f` must be a live handle, `x` must point to `len` doubles and `out` must
 * be a valid pointer.
 */
enum SoblabStatus soblab_function_eval(const struct SoblabFunction *f,
                                       const double *x,
                                       size_t len,
                                       double *out);

/**
 * ||f||_{W^{s,p}} on R^N or on the reference box [-1,1]^N. `p` may be
 * INFINITY. Returns `NotConverged` (with `out` filled) when the quadrature
 * did not reach `tol`.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum SoblabStatus soblab_norm(const struct SoblabFunction *f,
                              enum SoblabDomain domain,
                              double s,
                              double p,
                              double tol,
                              struct SoblabNorm *out);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`) and returns the full message length
 * in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t soblab_last_error(char *buf, size_t len);

/**
 * Static, NUL-terminated description of a status code.
 */
const char *soblab_status_str(enum SoblabStatus status);

/**
 * Library version, NUL-terminated.
 */
const char *soblab_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOBLAB_H */
