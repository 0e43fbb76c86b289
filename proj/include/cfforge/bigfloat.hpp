#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>

namespace cfforge {

using Bits = mpfr_prec_t;

/// Arbitrary-precision binary float with an explicit per-value precision.
///
/// Thin RAII owner of an `mpfr_t`. Binary arithmetic rounds to the larger of
/// the two operand precisions (round-to-nearest), so mixing precisions never
/// silently truncates the more precise operand.
class BigFloat {
 public:
  explicit BigFloat(Bits bits = 64);
  BigFloat(long value, Bits bits);
  BigFloat(const mpz_class& value, Bits bits);
  BigFloat(const mpq_class& value, Bits bits);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  /// Parses a decimal/scientific literal such as "3.14" or "-1e-30".
  static BigFloat from_decimal(const std::string& text, Bits bits);
  static BigFloat pow2(long exponent, Bits bits);

  Bits precision() const noexcept { return mpfr_get_prec(value_); }
  /// Copy rounded (or widened) to `bits`.
  BigFloat rounded(Bits bits) const;

  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_ptr get() noexcept { return value_; }

  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }
  /// Binary exponent e with 0.5 <= |x| / 2^e < 1; meaningless for zero.
  long exponent() const noexcept { return mpfr_get_exp(value_); }
  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Nearest integer.
  mpz_class round_to_integer() const;
  /// log2|x| as a double (-inf for zero).
  double log2_abs() const;

  /// `digits` significant decimal digits, e.g. "0.3379...e0" style avoided:
  /// plain positional notation when the exponent is modest, scientific otherwise.
  std::string to_string(int digits) const;

  BigFloat operator-() const;
  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat& operator*=(long rhs);
  BigFloat& operator/=(long rhs);

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, long b);
  friend BigFloat operator/(const BigFloat& a, long b);
  friend BigFloat operator+(const BigFloat& a, long b);
  friend BigFloat operator-(const BigFloat& a, long b);

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);

 private:
  mpfr_t value_;
};

BigFloat abs(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat pow(const BigFloat& x, long k);
/// Multiply by 2^k exactly.
BigFloat ldexp(const BigFloat& x, long k);
const BigFloat& max_abs(const BigFloat& a, const BigFloat& b);

/// Bits needed for `digits` decimal digits.
Bits digits_to_bits(int digits);

}  // namespace cfforge
