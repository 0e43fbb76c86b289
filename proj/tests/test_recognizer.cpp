#include "doctest.h"

#include "support.hpp"

#include "cfforge/cfengine.hpp"
#include "cfforge/errors.hpp"
#include "cfforge/mpval.hpp"
#include "cfforge/recognizer.hpp"

#include <cmath>

using namespace cfforge;
using testing_support::close;

namespace {

std::vector<long> as_longs(const Relation& r) {
  std::vector<long> out;
  for (const auto& c : r.coefficients) out.push_back(c.get_si());
  return out;
}

BigFloat dot(const std::vector<BigFloat>& x, const std::vector<mpz_class>& m, Bits bits) {
  BigFloat s(bits);
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * BigFloat(m[i], bits);
  return s;
}

}  // namespace

TEST_CASE("pslq finds small relations") {
  Bits bits = 256;
  BigFloat z3 = mpval::zeta_int(3, bits);
  auto r = pslq({z3, z3}, bits);
  REQUIRE(r);
  CHECK(as_longs(*r) == std::vector<long>{1, -1});

  // x = 8 - 2/3 pi^2 - 1/90 pi^4: 90 x - 720 + 60 pi^2 + pi^4 = 0
  BigFloat pi = mpval::const_pi(bits);
  BigFloat pi2 = pi * pi;
  BigFloat pi4 = pi2 * pi2;
  BigFloat x = BigFloat(8, bits) - pi2 * BigFloat(mpq_class(2, 3), bits) - pi4 / BigFloat(90, bits);
  std::vector<BigFloat> v = {x, BigFloat(1, bits), pi2, pi4};
  auto t = pslq(v, bits);
  REQUIRE(t);
  CHECK(as_longs(*t) == std::vector<long>{90, -720, 60, 1});
  CHECK(close(dot(v, t->coefficients, bits), BigFloat(bits), 200));
  CHECK(t->confidence_bits > 100);
}

TEST_CASE("pslq reports no relation for pi and e at 16 bits") {
  Bits bits = 256;
  BigFloat pi = mpval::const_pi(bits);
  BigFloat e = mpval::const_e(bits);
  CHECK(pslq({pi, e}, bits, 16) == std::nullopt);
  // oracle: no m1 pi + m2 e within the working precision for |m| < 2^16
  double best = 1.0;
  const double pd = pi.to_double();
  const double ed = e.to_double();
  for (long m1 = 1; m1 < (1L << 16); ++m1) {
    double m2 = std::round(m1 * pd / ed);
    if (std::abs(m2) >= (1L << 16)) break;
    best = std::min(best, std::abs(m1 * pd - m2 * ed));
  }
  CHECK(best > 1e-12);
}

TEST_CASE("pslq needs 128 bits") {
  BigFloat one(1, 64);
  CHECK_THROWS_AS(pslq({one, one}, 64), PrecisionTooLow);
}

TEST_CASE("recognize with a fixed basis") {
  Bits bits = 256;
  ConstantBasis basis = default_basis(1);
  // zeta(3) - zeta(2) + 1 = 0.5571...
  ValueSource src = [](Bits b) { return mpval::zeta_int(3, b) - mpval::zeta_int(2, b) + BigFloat(1, b); };
  auto cf = recognize(src, basis, bits);
  REQUIRE(cf);
  CHECK(render_closed_form(*cf) == "1 - zeta(2) + zeta(3)");

  auto zero = recognize(BigFloat(bits), basis, bits);
  REQUIRE(zero);
  CHECK(zero->empty());
}

TEST_CASE("recognize rejects a frozen value") {
  Bits bits = 300;
  ConstantBasis basis = default_basis(2);
  BigFloat frozen = mpval::const_pi(bits) + BigFloat::from_decimal("0.001", bits);
  CHECK(recognize(frozen, basis, bits) == std::nullopt);

  ValueSource live = [](Bits b) { return mpval::const_pi(b) + BigFloat(mpq_class(1, 1000), b); };
  auto cf = recognize(live, basis, bits);
  REQUIRE(cf);
  CHECK(cf->coeff(Atom::pi()) == 1);
  CHECK(cf->coeff(Atom::one()) == mpq_class(1, 1000));
}

TEST_CASE("basis levels") {
  CHECK(default_basis(1).size() == 8);
  CHECK(default_basis(2).size() == 13);
  CHECK(default_basis(3).size() == 18);
  ConstantBasis b = default_basis(2);
  CHECK(b.contains("zeta(2)"));
  CHECK(b.contains("catalan"));
  CHECK_FALSE(b.contains("pi*sqrt(3)"));
  std::size_t n = b.size();
  b.add(Atom::zeta(2));
  CHECK(b.size() == n);
  b.add(Atom::digamma(mpq_class(1, 3)));
  CHECK(b.size() == n + 1);
}

TEST_CASE("recognize reproduces the summed closed forms") {
  auto all = testing_support::bundled();
  int checked = 0;
  for (const auto& fx : all) {
    CFSpec s = CFSpec::parse(fx.f, fx.g);
    if (!s.exact()) continue;
    ClosedForm cf;
    try {
      cf = closed_form_for(s);
    } catch (const Unsupported&) {
      continue;
    }
    CAPTURE(fx.id);
    // bits scale with the coefficient sizes; the fixture values are not
    // recomputed here, the oracle is the symbolic form
    long coeff_bits = 8;
    for (const auto& [atom, c] : cf.terms()) {
      mpz_class num = abs(c.get_num()) * c.get_den();
      coeff_bits = std::max<long>(coeff_bits, static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)));
    }
    ConstantBasis basis = basis_for(cf);
    long lcm_bits = 0;
    for (const auto& [atom, c] : cf.terms()) lcm_bits += static_cast<long>(mpz_sizeinbase(c.get_den().get_mpz_t(), 2));
    int max_coeff = static_cast<int>(coeff_bits + lcm_bits + 8);
    Bits bits = std::max<Bits>(256, static_cast<Bits>((basis.size() + 1) * max_coeff * 2 + 64));
    ValueSource src = [cf](Bits b) { return eval_closed_form(cf, b); };
    auto got = recognize(src, basis, bits, max_coeff);
    REQUIRE(got);
    CHECK(*got == cf);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("level 3 basis picks up pi*sqrt(3)") {
  // f = n (3n+1), g = n + 1
  CFSpec s = CFSpec::parse("n*(3*n+1)", "n+1");
  ValueSource src = [s](Bits b) { return sum_series(s, b).value; };
  Bits bits = 400;
  ConstantBasis basis = default_basis(3);
  auto cf = recognize(src, basis, bits);
  REQUIRE(cf);
  BigFloat printed = eval_float(parse("1/12*(2*pi^2+9*pi*sqrt(3)-156+81*log(3))", {true}), bits);
  CHECK(close(eval_closed_form(*cf, bits), printed, 300));
}
