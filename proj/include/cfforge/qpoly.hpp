#pragma once

#include "cfforge/bigfloat.hpp"

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace cfforge {

/// Univariate polynomial over Q, coefficients stored lowest degree first.
/// The zero polynomial has no coefficients and degree -1.
class QPolynomial {
 public:
  QPolynomial() = default;
  explicit QPolynomial(std::vector<mpq_class> coeffs);
  QPolynomial(std::initializer_list<long> coeffs);

  static QPolynomial constant(const mpq_class& c);
  static QPolynomial monomial(const mpq_class& c, int degree);
  /// n + a
  static QPolynomial linear(const mpq_class& a);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  const std::vector<mpq_class>& coeffs() const noexcept { return coeffs_; }
  /// Coefficient of n^i (zero outside the stored range).
  mpq_class coeff(int i) const;
  mpq_class leading() const;

  mpq_class eval(const mpq_class& x) const;
  BigFloat eval(const BigFloat& x) const;

  /// p(n + s)
  QPolynomial shifted(const mpq_class& s) const;
  /// p(c n)
  QPolynomial scaled(const mpq_class& c) const;
  QPolynomial derivative() const;
  QPolynomial monic() const;
  /// Integer coefficients with gcd 1 and positive leading coefficient.
  QPolynomial primitive() const;
  /// Least common multiple of the coefficient denominators.
  mpz_class denominator_lcm() const;

  /// "2*n^2 + 3*n - 1" style; `var` names the variable.
  std::string render(const std::string& var = "n") const;

  QPolynomial operator-() const;
  QPolynomial& operator+=(const QPolynomial& rhs);
  QPolynomial& operator-=(const QPolynomial& rhs);
  QPolynomial& operator*=(const QPolynomial& rhs);
  QPolynomial& operator*=(const mpq_class& rhs);

  friend QPolynomial operator+(QPolynomial a, const QPolynomial& b) { return a += b; }
  friend QPolynomial operator-(QPolynomial a, const QPolynomial& b) { return a -= b; }
  friend QPolynomial operator*(QPolynomial a, const QPolynomial& b) { return a *= b; }
  friend QPolynomial operator*(QPolynomial a, const mpq_class& b) { return a *= b; }
  friend bool operator==(const QPolynomial& a, const QPolynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim();
  std::vector<mpq_class> coeffs_;
};

QPolynomial pow(const QPolynomial& p, int k);
/// Euclidean division; throws std::domain_error on a zero divisor.
std::pair<QPolynomial, QPolynomial> divmod(const QPolynomial& a, const QPolynomial& b);
/// Monic gcd (zero when both inputs are zero).
QPolynomial gcd(const QPolynomial& a, const QPolynomial& b);

struct SquareFreeFactor {
  QPolynomial factor;  // monic, square-free
  int multiplicity;
};
/// Yun's algorithm. The product of factor^multiplicity equals p / leading(p).
std::vector<SquareFreeFactor> square_free(const QPolynomial& p);

/// Distinct rational roots of p (ascending). Exact: Sturm-sequence isolation
/// on the primitive integer form, then an exact test of the only possible
/// candidate k / lead in each isolating interval.
std::vector<mpq_class> rational_roots(const QPolynomial& p);

/// Number of distinct real roots of p in the open interval (a, b); neither
/// endpoint may be a root.
int count_real_roots(const QPolynomial& p, const mpq_class& a, const mpq_class& b);

/// Reduced quotient of polynomials: gcd(num, den) = 1, den monic.
class RationalFunction {
 public:
  RationalFunction();
  RationalFunction(const QPolynomial& num);  // NOLINT(google-explicit-constructor)
  RationalFunction(QPolynomial num, QPolynomial den);

  const QPolynomial& num() const noexcept { return num_; }
  const QPolynomial& den() const noexcept { return den_; }
  bool is_polynomial() const noexcept { return den_.degree() == 0; }
  bool is_zero() const noexcept { return num_.is_zero(); }

  /// Throws DivisionByZero when the denominator vanishes at x.
  mpq_class eval(const mpq_class& x) const;
  BigFloat eval(const BigFloat& x) const;
  RationalFunction shifted(const mpq_class& s) const;
  std::string render(const std::string& var = "n") const;

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  /// Throws DivisionByZero for a zero divisor.
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  RationalFunction operator-() const;
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  QPolynomial num_;
  QPolynomial den_;
};

RationalFunction pow(const RationalFunction& r, int k);

/// Integer-coefficient form of a rational function, for fast repeated
/// evaluation at integers: value = num(n) / den(n).
class IntegerRational {
 public:
  explicit IntegerRational(const RationalFunction& r);
  /// Numerator and denominator at n, sign-normalised so the denominator is
  /// positive; den may be zero at a pole.
  void eval(long n, mpz_class& num, mpz_class& den) const;
  mpq_class eval(long n) const;

 private:
  std::vector<mpz_class> num_;
  std::vector<mpz_class> den_;
};

}  // namespace cfforge
