#pragma once

#include "cfforge/bigfloat.hpp"
#include "cfforge/expr.hpp"
#include "cfforge/telescope.hpp"

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cfforge {

struct BasisEntry {
  std::string label;
  /// Parsed form of the label when it is in the expression grammar (null for
  /// psi and hurwitz_zeta atoms).
  Expr expr;
  Atom atom;
};

/// Constants a value is expressed against. The value itself is prepended at
/// relation time and never stored here.
struct ConstantBasis {
  std::vector<BasisEntry> entries;
  int level = 0;

  std::size_t size() const noexcept { return entries.size(); }
  bool contains(const std::string& label) const;
  /// Entry for an atom of a closed form; labels stay unique.
  void add(const Atom& atom);
};

/// Level 1: 1, zeta(2..8). Level 2 adds gamma, log(2), log(3), catalan, pi.
/// Level 3 adds pi*sqrt(3), pi*sqrt(2), pi*log(2), pi^2*log(2), log(2)^2.
ConstantBasis default_basis(int level);
/// Basis made of the atoms of `cf` (plus the constant 1).
ConstantBasis basis_for(const ClosedForm& cf);

struct Relation {
  std::vector<mpz_class> coefficients;
  BigFloat residual;
  long confidence_bits = 0;
};

/// PSLQ. Coefficients come back with gcd 1 and the first nonzero one
/// positive; nullopt when no relation with coefficients below
/// 2^max_coeff_bits exists at this precision. Throws PrecisionTooLow below
/// 128 bits.
std::optional<Relation> pslq(const std::vector<BigFloat>& values, Bits precision_bits, int max_coeff_bits = 64);

/// Produces the value to recognize at a requested precision.
using ValueSource = std::function<BigFloat(Bits)>;

/// Solves the relation for x and re-checks it at precision_bits + 64; a
/// relation whose residual does not shrink there is rejected (nullopt).
std::optional<ClosedForm> recognize(const ValueSource& x, const ConstantBasis& basis, Bits precision_bits,
                                    int max_coeff_bits = 64);
/// A fixed value: it is taken as exact at every precision.
std::optional<ClosedForm> recognize(const BigFloat& x, const ConstantBasis& basis, Bits precision_bits,
                                    int max_coeff_bits = 64);

}  // namespace cfforge
