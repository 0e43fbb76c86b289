#pragma once

#include "cfforge/bigfloat.hpp"
#include "cfforge/cfengine.hpp"
#include "cfforge/expr.hpp"
#include "cfforge/qpoly.hpp"

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cfforge {

/// (n + shift)^multiplicity
struct LinearFactor {
  mpq_class shift;
  int multiplicity = 1;
  friend bool operator==(const LinearFactor&, const LinearFactor&) = default;
};

struct Factorization {
  /// Leading coefficient of the input.
  mpq_class unit;
  /// Distinct shifts, ascending.
  std::vector<LinearFactor> factors;
  /// Monic product of the factors that do not split over Q (1 when complete).
  QPolynomial remainder;
  bool complete() const { return remainder.degree() == 0; }
};

/// Factor p = unit * prod (n + a_i)^m_i * remainder over Q.
Factorization factor_shifts(const QPolynomial& p);

/// c / (n + shift)^power
struct PFTerm {
  mpq_class coeff;
  mpq_class shift;
  int power = 1;
  friend bool operator==(const PFTerm&, const PFTerm&) = default;
};

/// num / prod (n + a_i)^m_i as a sum of PFTerm; throws DegreeTooHigh when
/// deg num >= sum m_i. Zero coefficients are dropped.
std::vector<PFTerm> partial_fractions(const QPolynomial& num, const std::vector<LinearFactor>& factors);

/// Constant atoms of a closed form.
struct Atom {
  enum class Kind { One, Zeta, LogPrime, EulerGamma, Catalan, Pi, Digamma, Hurwitz, Custom };
  Kind kind = Kind::One;
  long k = 0;        // Zeta(k), LogPrime(p = k), Hurwitz(k, a)
  mpq_class a;       // Digamma(a), Hurwitz(k, a)
  std::string label; // Custom
  Expr expr;         // Custom

  static Atom one() { return {}; }
  static Atom zeta(long k);
  static Atom log_prime(long p);
  static Atom euler_gamma();
  static Atom catalan();
  static Atom pi();
  static Atom digamma(const mpq_class& a);
  static Atom hurwitz(long k, const mpq_class& a);
  /// Any constant expression, identified by its rendered label.
  static Atom custom(const Expr& e);

  std::string name() const;
  BigFloat eval(Bits bits) const;

  friend bool operator<(const Atom& x, const Atom& y);
  friend bool operator==(const Atom& x, const Atom& y);
};

/// Formal Q-linear combination of atoms. No zero coefficients are stored.
class ClosedForm {
 public:
  enum class Style { Zeta, Pi };

  void add(const Atom& atom, const mpq_class& coeff);
  /// Adds c * log(r) for rational r > 0 as a combination of LogPrime atoms.
  void add_log(const mpq_class& r, const mpq_class& coeff);
  mpq_class coeff(const Atom& atom) const;
  const std::map<Atom, mpq_class>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  ClosedForm& operator+=(const ClosedForm& other);
  ClosedForm operator*(const mpq_class& c) const;
  friend bool operator==(const ClosedForm& a, const ClosedForm& b) { return a.terms_ == b.terms_; }

 private:
  std::map<Atom, mpq_class> terms_;
};

BigFloat eval_closed_form(const ClosedForm& cf, Bits bits);
/// Zeta style: "8 - 4*zeta(2) - zeta(4)"; pi style rewrites zeta(2k) through
/// Bernoulli numbers: "8 - 2/3*pi^2 - 1/90*pi^4". The empty form renders as "".
std::string render_closed_form(const ClosedForm& cf, ClosedForm::Style style = ClosedForm::Style::Zeta);

/// Sum over n >= 0 of the given partial-fraction terms. Throws NonConvergent
/// when the simple-pole coefficients do not cancel, PoleAtIndex when a term
/// has a pole at some n >= 0.
ClosedForm sum_closed_form(const std::vector<PFTerm>& terms);

/// Closed form of S = g(0)^2 sum 1/(f(n+1) g(n) g(n+1)) for rational f, g.
/// Throws Unsupported when the denominator has a factor that does not split
/// into rational linear factors (or f, g are not rational functions).
ClosedForm closed_form_for(const CFSpec& spec);

/// The series terms as a reduced rational function of n.
RationalFunction series_term(const CFSpec& spec);

}  // namespace cfforge
