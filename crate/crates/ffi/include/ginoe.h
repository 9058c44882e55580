#ifndef GINOE_H
#define GINOE_H

#pragma once

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which component of a value to format.
typedef enum GinoePart {
  GINOE_PART_REAL = 0,
  GINOE_PART_IMAG = 1,
} GinoePart;

// Status codes. Nonzero values match the exit codes of the `ginoe` tool.
typedef enum GinoeStatus {
  GINOE_STATUS_OK = 0,
  GINOE_STATUS_INVALID_ARGUMENT = 2,
  GINOE_STATUS_DOMAIN = 3,
  GINOE_STATUS_VERIFICATION = 4,
  GINOE_STATUS_INTERNAL = 5,
} GinoeStatus;

// Working precision shared by computations.
typedef struct GinoeContext GinoeContext;

// A computed value with its rigorous error bound.
typedef struct GinoeValue GinoeValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. Valid until the next failing call.
const char *ginoe_last_error(void);

// New context with `bits` bits of target precision.
//
// # Safety
// `out` must be a valid pointer.
enum GinoeStatus ginoe_context_new(uint32_t bits, struct GinoeContext **out);

// # Safety
// `ctx` must come from [`ginoe_context_new`] and not be used afterwards.
void ginoe_context_free(struct GinoeContext *ctx);

// # Safety
// `v` must come from this library and not be used afterwards.
void ginoe_value_free(struct GinoeValue *v);

// Expected number of real eigenvalues, with its exact form in ℚ(√2).
//
// # Safety
// Pointers must be valid.
enum GinoeStatus ginoe_m0(const struct GinoeContext *ctx, uint32_t n, struct GinoeValue **out);

// `E Σ |λ|^(2p)` over real eigenvalues for complex `p = p_re + i p_im`.
//
// # Safety
// Pointers must be valid.
enum GinoeStatus ginoe_moment(const struct GinoeContext *ctx,
                              uint32_t n,
                              double p_re,
                              double p_im,
                              struct GinoeValue **out);

// Density of real eigenvalues at `x`.
//
// # Safety
// Pointers must be valid.
enum GinoeStatus ginoe_density(const struct GinoeContext *ctx,
                               uint32_t n,
                               double x,
                               struct GinoeValue **out);

// Moment generating function at real `t`.
//
// # Safety
// Pointers must be valid.
enum GinoeStatus ginoe_mgf(const struct GinoeContext *ctx,
                           uint32_t n,
                           double t,
                           struct GinoeValue **out);

// Stieltjes transform at `t = t_re + i t_im`, `t_im != 0`.
//
// # Safety
// Pointers must be valid.
enum GinoeStatus ginoe_stieltjes(const struct GinoeContext *ctx,
                                 uint32_t n,
                                 double t_re,
                                 double t_im,
                                 struct GinoeValue **out);

// Monte Carlo estimate of `E Σ λ^(2p)` over real eigenvalues.
//
// # Safety
// `mean` and `std_error` must be valid.
enum GinoeStatus ginoe_mc_moment(uint32_t n,
                                 uint32_t p,
                                 uint64_t samples,
                                 uint64_t seed,
                                 uint32_t workers,
                                 double *mean,
                                 double *std_error);

// Nearest double to a component's midpoint.
//
// # Safety
// `v` must be a valid handle.
double ginoe_value_mid(const struct GinoeValue *v, enum GinoePart part);

// Upper bound on the absolute error of either component.
//
// # Safety
// `v` must be a valid handle.
double ginoe_value_err(const struct GinoeValue *v);

// Decimal string of a component at the context precision. Returns the string
// length; at most `len - 1` bytes plus a NUL are written to `buf`.
//
// # Safety
// `v` must be valid; `buf` must hold `len` bytes or be null.
size_t ginoe_value_decimal(const struct GinoeValue *v, enum GinoePart part, char *buf, size_t len);

// Exact form as `"a + b*sqrt(2)"`, or length 0 when none is known.
//
// # Safety
// `v` must be valid; `buf` must hold `len` bytes or be null.
size_t ginoe_value_exact(const struct GinoeValue *v, char *buf, size_t len);

// Library version, static storage.
const char *ginoe_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GINOE_H */
