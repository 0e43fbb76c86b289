#pragma once

#include "cfforge/bigfloat.hpp"
#include "cfforge/mpval.hpp"
#include "cfforge/qpoly.hpp"

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>

namespace cfforge {

enum class NamedConst { Pi, Gamma, Catalan, E };

struct Node;
/// Immutable expression tree; shared subtrees are never mutated.
using Expr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Int, Rat, Var, Const, Zeta, Func, Neg, Add, Sub, Mul, Div, Pow };

  Kind kind = Kind::Int;
  mpq_class value;           // Int, Rat
  NamedConst constant{};     // Const
  int zeta_k = 0;            // Zeta
  mpval::Fn fn{};            // Func
  long exponent = 0;         // Pow
  Expr lhs;                  // unary child, or left operand
  Expr rhs;                  // right operand
};

namespace expr {

Expr integer(const mpz_class& v);
Expr rational(const mpq_class& v);  // Int when the denominator is 1
Expr var();
Expr constant(NamedConst c);
Expr zeta(int k);
Expr func(mpval::Fn fn, Expr arg);
Expr neg(Expr a);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow(Expr base, long exponent);

}  // namespace expr

struct ParseOptions {
  /// Accept `z` and `v` as spellings of `n` (fixture files use them).
  bool variable_aliases = false;
};

/// Parses and normalizes. Throws SyntaxError / UnknownIdentifier.
Expr parse(const std::string& text, ParseOptions options = {});
std::string render(const Expr& e);
/// Folds literal arithmetic bottom-up and removes double negation.
Expr normalize(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);
bool contains_var(const Expr& e);

/// Exact value at n, or nullopt when a surd/transcendental atom survives.
/// Throws DivisionByZero naming the offending subterm.
std::optional<mpq_class> eval_rational(const Expr& e, const mpq_class& n);
std::optional<mpq_class> eval_rational(const Expr& e);

/// Throws DomainError / DivisionByZero. Result carries `bits` of precision.
BigFloat eval_float(const Expr& e, const BigFloat& n, Bits bits);
BigFloat eval_float(const Expr& e, Bits bits);

/// Canonical reduced form, or nullopt when e is not a rational function of n.
std::optional<RationalFunction> as_rational_function(const Expr& e);

/// Replace every occurrence of the variable with `replacement`.
Expr substitute(const Expr& e, const Expr& replacement);
/// e(n + k)
Expr shift(const Expr& e, long k);

}  // namespace cfforge
