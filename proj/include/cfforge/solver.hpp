#pragma once

#include "cfforge/bigfloat.hpp"
#include "cfforge/expr.hpp"
#include "cfforge/qpoly.hpp"
#include "cfforge/telescope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfforge {

/// q with q^2 = p and positive leading coefficient, or nullopt.
std::optional<QPolynomial> poly_sqrt(const QPolynomial& p);
/// Same for a rational function (numerator and denominator separately).
std::optional<RationalFunction> poly_sqrt(const RationalFunction& r);

/// b(n) g(n) - f(n+1) g(n+1) - f(n) g(n-1)
RationalFunction functional_residual(const RationalFunction& f, const RationalFunction& b, const QPolynomial& g);

/// Every g with deg g <= max_degree solving the functional equation, as an
/// echelon basis of the solution space: primitive, positive leading
/// coefficient, distinct degrees, ascending.
std::vector<QPolynomial> solve_g(const RationalFunction& f, const RationalFunction& b, int max_degree);

struct QuarticCandidate {
  QPolynomial f;
  QPolynomial g;
};

/// With beta1 = beta - alpha, gamma1 = gamma - alpha: f = n,
/// g = (gamma1 - beta1) n + beta1. Throws Degenerate when beta1 = gamma1.
QuarticCandidate normalize_quartic(const mpq_class& alpha, const mpq_class& beta, const mpq_class& gamma);

struct ProofChecks {
  bool b0_consistent = false;
  bool f0_zero = false;
  /// Degree of the cleared functional equation whose coefficients were all
  /// checked to vanish (-1 when no g was found).
  int functional_identity_verified_degree = -1;
};

struct ProofResult {
  enum class Status { Proved, Candidate, Failed };

  RationalFunction f;
  QPolynomial g;
  /// Closed form of S = lim q_N / p_N for the normalized pair (f, g).
  std::optional<ClosedForm> closed_form;
  ProofChecks checks;
  Status status = Status::Failed;

  /// "square" (a = -f^2) or "quartic" (a = -s^2 f(n)^2 g(n) g(n-1)).
  std::string route;
  /// s above; 1 on the square route.
  mpq_class scale = 1;
  /// The given continued fraction equals offset + multiplier / S.
  mpq_class offset = 0;
  mpq_class multiplier = 1;
  /// Value of the given continued fraction through the closed form (or the
  /// series when there is none), and by iterating the given a, b directly.
  std::optional<BigFloat> value;
  std::optional<BigFloat> direct_value;
  std::optional<BigFloat> direct_error;
  std::vector<std::string> diagnostics;
};

std::string to_string(ProofResult::Status s);

struct ProveOptions {
  int max_degree = 6;
  Bits bits = 167;
};

/// Recover (f, g) from a continued fraction with partial numerators a and
/// denominators b, then sum it in closed form when possible. Throws
/// InvalidSpec when a, b are not rational functions of n.
ProofResult prove(const Expr& a, const Expr& b, ProveOptions options = {});

}  // namespace cfforge
