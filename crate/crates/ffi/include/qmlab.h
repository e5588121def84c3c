#ifndef QMLAB_H
#define QMLAB_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum QmlabStatus {
  QMLAB_STATUS_OK = 0,
  QMLAB_STATUS_NULL_POINTER = 1,
  QMLAB_STATUS_INVALID_UTF8 = 2,
  QMLAB_STATUS_PARSE = 3,
  /**
   * Input violates a documented precondition (not modular, weight mismatch, ...).
   */
  QMLAB_STATUS_PRECONDITION = 4,
  /**
   * Numeric evaluation requested outside the supported domain.
   */
  QMLAB_STATUS_EVALUATION_DOMAIN = 5,
  /**
   * A value does not fit the requested C type.
   */
  QMLAB_STATUS_OVERFLOW = 6,
  QMLAB_STATUS_PANIC = 7,
} QmlabStatus;

/**
 * Unary operators on forms.
 */
typedef enum QmlabOperator {
  /**
   * `D = q d/dq`, raises weight by 2.
   */
  QMLAB_OPERATOR_D = 0,
  /**
   * Lowering operator `δ`, lowers weight by 2.
   */
  QMLAB_OPERATOR_DELTA = 1,
  /**
   * Multiplication by the weight.
   */
  QMLAB_OPERATOR_H = 2,
  /**
   * `D - k·E2/12`.
   */
  QMLAB_OPERATOR_SERRE = 3,
} QmlabOperator;

typedef struct QmlabForm QmlabForm;

typedef struct QmlabSeries QmlabSeries;

typedef struct QmlabUea QmlabUea;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next library call on the same thread.
 */
const char *qmlab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qmlab_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qmlab_string_free(char *s);

/**
 * Parses a form from an expression such as `"E2^2 - E4"` or from its JSON
 * encoding. Pass a negative `weight` to infer it; the zero polynomial needs
 * an explicit weight.
 *
 * # Safety
 * `input` must be a NUL-terminated string; `out` must be writable.
 */
enum QmlabStatus qmlab_form_parse(const char *input, int32_t weight, struct QmlabForm **out);

/**
 * Normalized Eisenstein series `E_k` for `k` in {2, 4, 6}.
 *
 * # Safety
 * `out` must be writable.
 */
enum QmlabStatus qmlab_form_eisenstein(uint32_t k, struct QmlabForm **out);

/**
 * Deep copy of a form.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_clone(const struct QmlabForm *f, struct QmlabForm **out);

/**
 * # Safety
 * `f` must come from this library and not have been freed. NULL is ignored.
 */
void qmlab_form_free(struct QmlabForm *f);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_weight(const struct QmlabForm *f, uint32_t *out);

/**
 * Depth (degree in `E2`). Fails for the zero form.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_depth(const struct QmlabForm *f, uint32_t *out);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_is_zero(const struct QmlabForm *f, bool *out);

/**
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum QmlabStatus qmlab_form_equal(const struct QmlabForm *a, const struct QmlabForm *b, bool *out);

/**
 * Applies `op` to `f` `times` times.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_apply(const struct QmlabForm *f,
                                  enum QmlabOperator op,
                                  uint32_t times,
                                  struct QmlabForm **out);

/**
 * Sum of two forms of equal weight.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum QmlabStatus qmlab_form_add(const struct QmlabForm *a,
                                const struct QmlabForm *b,
                                struct QmlabForm **out);

/**
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum QmlabStatus qmlab_form_mul(const struct QmlabForm *a,
                                const struct QmlabForm *b,
                                struct QmlabForm **out);

/**
 * Multiplies by the rational `num/den`.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_scale(const struct QmlabForm *f,
                                  int64_t num,
                                  int64_t den,
                                  struct QmlabForm **out);

/**
 * First Rankin–Cohen bracket of two modular forms.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum QmlabStatus qmlab_form_rc1(const struct QmlabForm *a,
                                const struct QmlabForm *b,
                                struct QmlabForm **out);

/**
 * Human-readable polynomial, e.g. `E2*E4 - E6`.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable. Free the result with
 * [`qmlab_string_free`].
 */
enum QmlabStatus qmlab_form_to_string(const struct QmlabForm *f, char **out);

/**
 * JSON `{"weight":k,"poly":[...]}`.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_to_json(const struct QmlabForm *f, char **out);

/**
 * Depth decomposition into modular parts and derivatives of `φ`, as JSON.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_decompose_json(const struct QmlabForm *f, char **out);

/**
 * Checks the weight-`k` transformation law of `f` under `(a b; c d)` at
 * `z = re + i·im`. Writes the largest residual and whether it stayed within
 * `tol` plus the truncation bound.
 *
 * # Safety
 * `f` must be a live handle; out pointers must be writable.
 */
enum QmlabStatus qmlab_form_check_transformation(const struct QmlabForm *f,
                                                 int64_t a,
                                                 int64_t b,
                                                 int64_t c,
                                                 int64_t d,
                                                 double re,
                                                 double im,
                                                 double tol,
                                                 double *max_residual,
                                                 bool *passed);

/**
 * Truncated q-expansion with `precision` coefficients.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_form_qexpansion(const struct QmlabForm *f,
                                       size_t precision,
                                       struct QmlabSeries **out);

/**
 * # Safety
 * `s` must come from this library and not have been freed. NULL is ignored.
 */
void qmlab_series_free(struct QmlabSeries *s);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_series_precision(const struct QmlabSeries *s, size_t *out);

/**
 * Coefficient of `q^n` as `num/den` in lowest terms. Fails with
 * `QMLAB_STATUS_OVERFLOW` when either part exceeds 64 bits and with
 * `QMLAB_STATUS_PRECONDITION` when `n` is beyond the precision.
 *
 * # Safety
 * `s` must be a live handle; out pointers must be writable.
 */
enum QmlabStatus qmlab_series_coeff(const struct QmlabSeries *s,
                                    size_t n,
                                    int64_t *num,
                                    int64_t *den);

/**
 * Coefficient of `q^n` as a decimal string `"p/q"` (or `"p"`).
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_series_coeff_string(const struct QmlabSeries *s, size_t n, char **out);

/**
 * Evaluates at `z = re + i·im` with `q = exp(2πiz)`. `growth_exponent` is
 * the assumed polynomial growth of the coefficients used for the tail bound.
 *
 * # Safety
 * `s` must be a live handle; out pointers must be writable.
 */
enum QmlabStatus qmlab_series_evaluate(const struct QmlabSeries *s,
                                       double re,
                                       double im,
                                       double growth_exponent,
                                       double *out_re,
                                       double *out_im,
                                       double *tail_bound);

/**
 * PBW normal form of a word over `D`, `H`, `d` (e.g. `"d d D D"` or `"ddDD"`).
 *
 * # Safety
 * `word` must be a NUL-terminated string; `out` must be writable.
 */
enum QmlabStatus qmlab_uea_from_word(const char *word, struct QmlabUea **out);

/**
 * # Safety
 * `u` must come from this library and not have been freed. NULL is ignored.
 */
void qmlab_uea_free(struct QmlabUea *u);

/**
 * One line per PBW monomial: coefficient, then `D^a H^b d^c`.
 *
 * # Safety
 * `u` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_uea_to_text(const struct QmlabUea *u, char **out);

/**
 * Number of PBW monomials with nonzero coefficient.
 *
 * # Safety
 * `u` must be a live handle; `out` must be writable.
 */
enum QmlabStatus qmlab_uea_len(const struct QmlabUea *u, size_t *out);

/**
 * Acts on a homogeneous form. Fails when the image is not homogeneous.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum QmlabStatus qmlab_uea_act(const struct QmlabUea *u,
                               const struct QmlabForm *f,
                               struct QmlabForm **out);

/**
 * Checks the PBW expansion of `δⁿDⁿ` against its closed form.
 *
 * # Safety
 * `out` must be writable.
 */
enum QmlabStatus qmlab_verify_prop4(uint32_t n, bool *out);

/**
 * Runs a `qmlab` command line (without the program name) in-process.
 * Writes the exit status and the captured stdout and stderr; both strings
 * must be released with [`qmlab_string_free`].
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; out pointers must be
 * writable.
 */
enum QmlabStatus qmlab_cli_run(size_t argc,
                               const char *const *argv,
                               int32_t *exit_status,
                               char **out_stdout,
                               char **out_stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMLAB_H */
