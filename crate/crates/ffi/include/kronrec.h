#ifndef KRONREC_H
#define KRONREC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KrMahlerVariant {
  KR_MAHLER_VARIANT_PLAIN = 0,
  KR_MAHLER_VARIANT_HALF_SCALED = 1,
  KR_MAHLER_VARIANT_DOUBLE_SCALED = 2,
  KR_MAHLER_VARIANT_CONJUGATE = 3,
} KrMahlerVariant;

typedef enum KrStatus {
  KR_STATUS_OK = 0,
  KR_STATUS_NULL_POINTER = 1,
  KR_STATUS_INVALID_POLYNOMIAL = 2,
  KR_STATUS_INVALID_ARGUMENT = 3,
  KR_STATUS_DOMAIN_ERROR = 4,
  KR_STATUS_NUMERIC_FAILURE = 5,
  KR_STATUS_UTF8 = 6,
  KR_STATUS_PANIC = 7,
} KrStatus;

// Opaque polynomial with integer coefficients.
typedef struct KrPolynomial KrPolynomial;

// Lower and upper ends of each certified bound.
typedef struct KrEpsilonBound {
  double half_scaled_lo;
  double half_scaled_hi;
  double double_scaled_lo;
  double double_scaled_hi;
  double stated_lo;
  double stated_hi;
  double refined_lo;
  double refined_hi;
  double coarse_lo;
  double coarse_hi;
} KrEpsilonBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses comma-separated coefficients, constant term first (`"-2,1"` is `x - 2`).
//
// # Safety
// `text` must be a NUL-terminated string and `result` a valid pointer.
enum KrStatus kr_polynomial_parse(const char *text, struct KrPolynomial **result);

// Builds a polynomial from `len` coefficients, constant term first.
//
// # Safety
// `coeffs` must point to `len` readable values and `result` must be valid.
enum KrStatus kr_polynomial_from_coeffs(const int64_t *coeffs,
                                        size_t len,
                                        struct KrPolynomial **result);

// Releases a handle; null is ignored.
//
// # Safety
// `p` must come from this library and not be used afterwards.
void kr_polynomial_free(struct KrPolynomial *p);

// # Safety
// Pointers must be valid.
enum KrStatus kr_polynomial_degree(const struct KrPolynomial *p, size_t *degree);

// # Safety
// Pointers must be valid.
enum KrStatus kr_mahler_measure(const struct KrPolynomial *p,
                                enum KrMahlerVariant variant,
                                double *value,
                                double *error);

// # Safety
// Pointers must be valid.
enum KrStatus kr_epsilon_bound(const struct KrPolynomial *p, struct KrEpsilonBound *bound);

// Sets `certified` when the volume bound proves the subgroup is not
// `eps`-dense in the `m`-torus.
//
// # Safety
// Pointers must be valid.
enum KrStatus kr_certify_non_density(const struct KrPolynomial *p,
                                     size_t m,
                                     double eps,
                                     double *volume_bound,
                                     bool *certified);

// Index of the integral recurrences of length `m` in the rational ones,
// as a decimal string.
//
// # Safety
// Pointers must be valid; free the string with [`kr_string_free`].
enum KrStatus kr_lattice_index(const struct KrPolynomial *p, size_t m, char **index);

// Canonical `p`-adic basis as JSON; rationals are `"p/q"` strings.
// `positive_pivot` selects the first strictly positive slope as pivot.
//
// # Safety
// Pointers must be valid; free the string with [`kr_string_free`].
enum KrStatus kr_canonical_basis_json(const struct KrPolynomial *p,
                                      uint64_t prime,
                                      size_t m,
                                      bool positive_pivot,
                                      char **json);

// Determinant of the `n x n` Toeplitz matrix of the integer symbol
// `coeffs[0] x^{-r} + ... + coeffs[len-1] x^{len-1-r}`.
//
// # Safety
// `coeffs` must point to `len` values and `value` must be valid.
enum KrStatus kr_trench_det(const int64_t *coeffs, size_t len, size_t r, size_t n, double *value);

// # Safety
// `s` must come from this library or be null.
void kr_string_free(char *s);

// Message for the last failing call on this thread; empty after success.
// The pointer stays valid until the next library call on the same thread.
const char *kr_last_error_message(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* KRONREC_H */
