#pragma once

#include "cfforge/bigfloat.hpp"

#include <gmpxx.h>

namespace cfforge::mpval {

/// Extra bits carried by every internal computation before the final rounding.
inline constexpr Bits kGuardBits = 32;

// Fundamental constants. Absolute error < 2^-bits; results are cached per
// (constant, precision) and the cache is safe for concurrent use.
BigFloat const_pi(Bits bits);
BigFloat const_gamma(Bits bits);
BigFloat const_catalan(Bits bits);
BigFloat const_e(Bits bits);

/// Riemann zeta at an integer k >= 2. Even k go through the exact Bernoulli
/// rational times pi^k; odd k use an accelerated alternating series.
BigFloat zeta_int(int k, Bits bits);

enum class Fn { Exp, Log, Sqrt, Tanh, Coth, Tan, Cot, Atanh };

/// Elementary function evaluated at the precision of `x`.
/// Throws DomainError outside the function's domain.
BigFloat elem(Fn fn, const BigFloat& x);
const char* fn_name(Fn fn);

/// log r for rational r > 0; throws DomainError ("NonPositive") otherwise.
BigFloat log_rational(const mpq_class& r, Bits bits);

/// Exact Bernoulli number B_n (B_1 = -1/2 convention).
mpq_class bernoulli(int n);

/// Hurwitz zeta sum_{n>=0} (n+a)^-k for integer k >= 2 and rational a > 0.
BigFloat hurwitz_zeta(int k, const mpq_class& a, Bits bits);

/// Digamma at a positive rational (Gauss's theorem on the fractional part plus
/// the recurrence psi(x+1) = psi(x) + 1/x).
BigFloat digamma(const mpq_class& a, Bits bits);

/// Independent second routes, used for cross-checks.
namespace alt {

/// Machin's arctangent formula.
BigFloat pi_machin(Bits bits);
/// Euler-Maclaurin summation of the harmonic numbers.
BigFloat gamma_euler_maclaurin(Bits bits);
/// Accelerated alternating series for Dirichlet beta(2).
BigFloat catalan_alternating(Bits bits);
/// zeta(3) = 5/2 sum (-1)^(k+1) / (k^3 binom(2k,k)).
BigFloat zeta3_apery(Bits bits);
/// zeta(k) = eta(k) / (1 - 2^(1-k)) with an accelerated eta series, any k >= 2.
BigFloat zeta_alternating(int k, Bits bits);
/// Asymptotic expansion of digamma after upward recurrence; any x > 0.
BigFloat digamma_asymptotic(const BigFloat& x);

}  // namespace alt

/// Brent-McMillan without the cache (exposed for self-consistency checks).
BigFloat gamma_brent_mcmillan(Bits bits);
/// Gauss-Legendre AGM iteration without the cache.
BigFloat pi_agm(Bits bits);
/// Ramanujan's series for Catalan's constant without the cache.
BigFloat catalan_ramanujan(Bits bits);

}  // namespace cfforge::mpval
