#pragma once

#include "cfforge/bigfloat.hpp"
#include "cfforge/expr.hpp"
#include "cfforge/qpoly.hpp"

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace cfforge {

struct SpecOptions {
  /// f(n) != 0 is checked for 1 <= n <= n_check, g(n) != 0 for 0 <= n <= n_check.
  long n_check = 64;
  /// Precision of the numeric checks applied when f, g are not exactly evaluable.
  Bits check_bits = 128;
};

/// A continued fraction built from two sequences f, g:
///   a_n = -f(n)^2,  b_n = (f(n+1) g(n+1) + f(n) g(n-1)) / g(n),
///   b_0 = f(1) g(1) / g(0).
class CFSpec {
 public:
  /// Validates f(0) = 0 and the non-vanishing conditions; throws InvalidSpec.
  static CFSpec create(Expr f, Expr g, SpecOptions options = {});
  /// Parses both expressions (z and v accepted as the variable) and validates.
  static CFSpec parse(const std::string& f, const std::string& g, SpecOptions options = {});

  const Expr& f() const noexcept { return f_; }
  const Expr& g() const noexcept { return g_; }
  /// Both f and g are rational functions of n with rational coefficients.
  bool exact() const noexcept { return f_rational_.has_value() && g_rational_.has_value(); }
  const std::optional<RationalFunction>& f_rational() const noexcept { return f_rational_; }
  const std::optional<RationalFunction>& g_rational() const noexcept { return g_rational_; }

  /// Exact values; require exact(). Throw PoleAtIndex at a pole.
  mpq_class f_at(long n) const;
  mpq_class g_at(long n) const;
  /// Numeric values at `bits` precision; exact specs are rounded from the exact value.
  BigFloat f_at(long n, Bits bits) const;
  BigFloat g_at(long n, Bits bits) const;

  std::string describe() const;

 private:
  CFSpec() = default;
  Expr f_;
  Expr g_;
  std::optional<RationalFunction> f_rational_;
  std::optional<RationalFunction> g_rational_;
  std::shared_ptr<const IntegerRational> f_int_;
  std::shared_ptr<const IntegerRational> g_int_;
};

/// Exact rational or floating value.
using Scalar = std::variant<mpq_class, BigFloat>;

std::string to_string(const Scalar& s, int digits = 30);
BigFloat to_bigfloat(const Scalar& s, Bits bits);

/// a_n for n >= 1 (exact when the spec is exact, otherwise at `bits`).
Scalar a_n(const CFSpec& spec, long n, Bits bits = 128);
/// b_n for n >= 0; b_0 = f(1) g(1) / g(0).
Scalar b_n(const CFSpec& spec, long n, Bits bits = 128);
/// The b_n formula as an expression in n (valid for n >= 1).
Expr b_n_expr(const CFSpec& spec);

/// (p_{N-1}, p_N, q_{N-1}, q_N) under p_{-1} = 1, p_0 = b_0, q_{-1} = 0, q_0 = 1.
/// Float states may carry a common exact power-of-two factor 2^scale_log2
/// (the true entries are the stored ones times 2^scale_log2); ratios are unaffected.
template <class T>
struct Convergents {
  T p_prev;
  T p;
  T q_prev;
  T q;
  long n = 0;
  long scale_log2 = 0;
};

enum class Mode { Exact, Float };
using ConvergentState = std::variant<Convergents<mpq_class>, Convergents<BigFloat>>;

/// Exact iteration. Throws OverflowBudget when an entry exceeds `max_bits`.
Convergents<mpq_class> iterate_exact(const CFSpec& spec, long N, long max_bits = 10'000'000);
Convergents<BigFloat> iterate_float(const CFSpec& spec, long N, Bits bits);
ConvergentState iterate_cf(const CFSpec& spec, long N, Mode mode, Bits bits = 128);

/// S_N = g(0)^2 * sum_{i=0}^{N} 1 / (f(i+1) g(i) g(i+1)), exact.
mpq_class partial_sum(const CFSpec& spec, long N);
/// prod_{i=1}^{n+1} f(i), exact.
mpq_class F(const CFSpec& spec, long n);

struct SeriesOptions {
  /// Maximum number of terms summed before giving up.
  long max_terms = 1L << 20;
};

struct SeriesResult {
  BigFloat value;
  long n_terms = 0;
  BigFloat error_estimate;
  /// Extrapolated tails are heuristic; always false for them.
  bool rigorous = false;
  /// "geometric" (direct summation) or "extrapolated" (polynomial decay).
  std::string method;
  /// The same limit computed from the continued-fraction convergents q_N/p_N
  /// (iterated independently of the series terms).
  BigFloat cf_value;
  BigFloat cf_error_estimate;
};

/// S = lim q_N / p_N = g(0)^2 * sum_{i>=0} 1 / (f(i+1) g(i) g(i+1)); the CF value is 1/S.
/// Throws DivergentSeries, SlowConvergence, IrregularTerms.
SeriesResult sum_series(const CFSpec& spec, Bits bits, SeriesOptions options = {});

struct VerifyReport {
  bool verified = false;
  BigFloat series_value;
  BigFloat cf_value;
  BigFloat closed_value;
  BigFloat abs_err;
  BigFloat series_estimate;
  long n_terms = 0;
  Bits precision_bits = 0;
};

/// verified iff |series - closed| < 10^-agreement_digits and the continued
/// fraction convergent agrees with the series within their combined estimates.
VerifyReport verify_identity(const CFSpec& spec, const Expr& closed_form, Bits bits, int agreement_digits,
                             SeriesOptions options = {});

}  // namespace cfforge
