#include "doctest.h"

#include "support.hpp"

#include "cfforge/errors.hpp"
#include "cfforge/mpval.hpp"
#include "cfforge/telescope.hpp"

#include <random>

using namespace cfforge;
using testing_support::close;
using testing_support::close_digits;

namespace {

QPolynomial lin(const mpq_class& a) { return QPolynomial::linear(a); }

/// Recombines partial fractions into a single rational function.
RationalFunction recombine(const std::vector<PFTerm>& terms) {
  RationalFunction sum;
  for (const auto& t : terms) {
    sum = sum + RationalFunction(QPolynomial::constant(t.coeff), pow(lin(t.shift), t.power));
  }
  return sum;
}

ClosedForm cf_of(const std::string& f, const std::string& g) { return closed_form_for(CFSpec::parse(f, g)); }

}  // namespace

TEST_CASE("factor_shifts") {
  // 4 (n+1/2)(n+3/2)(n+1)^4
  QPolynomial p = QPolynomial::constant(4) * lin(mpq_class(1, 2)) * lin(mpq_class(3, 2)) * pow(lin(1), 4);
  Factorization fac = factor_shifts(p);
  CHECK(fac.unit == 4);
  CHECK(fac.complete());
  REQUIRE(fac.factors.size() == 3);
  CHECK(fac.factors[0] == LinearFactor{mpq_class(1, 2), 1});
  CHECK(fac.factors[1] == LinearFactor{mpq_class(1), 4});
  CHECK(fac.factors[2] == LinearFactor{mpq_class(3, 2), 1});

  // (n^2 + 1)^2 (n - 2) keeps the irreducible part
  QPolynomial q = pow(QPolynomial{1, 0, 1}, 2) * lin(-2);
  Factorization fq = factor_shifts(q);
  CHECK_FALSE(fq.complete());
  CHECK(fq.remainder == pow(QPolynomial{1, 0, 1}, 2));
  REQUIRE(fq.factors.size() == 1);
  CHECK(fq.factors[0].shift == -2);
}

TEST_CASE("partial fractions of 1/((n+1)^4 (n+2))") {
  auto pf = partial_fractions(QPolynomial{1}, {{1, 4}, {2, 1}});
  // x = n + 1: 1/(x^4 (x+1)) = 1/x^4 - 1/x^3 + 1/x^2 - 1/x + 1/(x+1)
  std::vector<PFTerm> expected = {{1, 1, 4}, {-1, 1, 3}, {1, 1, 2}, {-1, 1, 1}, {1, 2, 1}};
  CHECK(pf == expected);
  CHECK_THROWS_AS(partial_fractions(QPolynomial{0, 0, 1}, {{1, 2}}), DegreeTooHigh);
}

TEST_CASE("partial fractions recombine to the input") {
  std::mt19937 rng(7);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LinearFactor> factors;
    int total = 0;
    int k = uni(1, 4);
    for (int i = 0; i < k; ++i) {
      mpq_class shift(uni(-12, 12), uni(1, 4));
      shift.canonicalize();
      bool dup = false;
      for (const auto& f : factors) dup = dup || f.shift == shift;
      if (dup) continue;
      int m = uni(1, 3);
      factors.push_back({shift, m});
      total += m;
    }
    std::vector<mpq_class> coeffs;
    for (int i = 0; i < total; ++i) coeffs.emplace_back(uni(-9, 9), uni(1, 3));
    QPolynomial num(coeffs);
    if (num.is_zero()) continue;
    QPolynomial den = QPolynomial::constant(1);
    for (const auto& f : factors) den *= pow(lin(f.shift), f.multiplicity);
    CHECK(recombine(partial_fractions(num, factors)) == RationalFunction(num, den));
  }
}

TEST_CASE("closed forms of the polynomial triples") {
  ClosedForm a = cf_of("v^2", "v+1");
  ClosedForm ea;
  ea.add(Atom::zeta(3), 1);
  ea.add(Atom::zeta(2), -1);
  ea.add(Atom::one(), 1);
  CHECK(a == ea);

  ClosedForm b = cf_of("v^3", "v+1");
  ClosedForm eb;
  eb.add(Atom::zeta(4), 1);
  eb.add(Atom::zeta(3), -1);
  eb.add(Atom::zeta(2), 1);
  eb.add(Atom::one(), -1);
  CHECK(b == eb);

  // -zeta(3)-zeta(5)-zeta(7)+pi^8/9450+pi^6/945+pi^4/90+pi^2/6-1
  ClosedForm c = cf_of("v^7", "v+1");
  ClosedForm ec;
  for (long k : {3L, 5L, 7L}) ec.add(Atom::zeta(k), -1);
  for (long k : {2L, 4L, 6L, 8L}) ec.add(Atom::zeta(k), 1);
  ec.add(Atom::one(), -1);
  CHECK(c == ec);
  CHECK(c.terms().size() == 8);

  // zeta(2) - 7 + 8 log 2
  ClosedForm d = cf_of("v*(2*v+1)", "v+1");
  ClosedForm ed;
  ed.add(Atom::zeta(2), 1);
  ed.add(Atom::one(), -7);
  ed.add(Atom::log_prime(2), 8);
  CHECK(d == ed);

  ClosedForm t = cf_of("v^4", "2*v+1");
  CHECK(render_closed_form(t) == "8 - 4*zeta(2) - zeta(4)");
  CHECK(render_closed_form(t, ClosedForm::Style::Pi) == "8 - 2/3*pi^2 - 1/90*pi^4");
}

TEST_CASE("closed forms agree with the printed ones for every exact fixture") {
  auto all = testing_support::bundled();
  Bits bits = 300;
  int checked = 0;
  for (const auto& fx : all) {
    CFSpec s = CFSpec::parse(fx.f, fx.g);
    if (!s.exact()) continue;
    CAPTURE(fx.id);
    std::optional<ClosedForm> cf;
    try {
      cf = closed_form_for(s);
    } catch (const Unsupported&) {
      // irreducible quadratic factors
      CHECK((std::find(fx.tags.begin(), fx.tags.end(), "irreducible") != fx.tags.end()));
      continue;
    }
    BigFloat printed = eval_float(parse(*fx.closed_form, {true}), bits + 200);
    CHECK(close(eval_closed_form(*cf, bits), printed, bits - 8));
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("digamma and Hurwitz shifts") {
  Bits bits = 200;
  BigFloat pi = mpval::const_pi(bits);
  // sum 1/(n+1/3) - 1/(n+2/3) = psi(2/3) - psi(1/3) = pi / sqrt(3)
  ClosedForm a = sum_closed_form({{1, mpq_class(1, 3), 1}, {-1, mpq_class(2, 3), 1}});
  CHECK(close(eval_closed_form(a, bits), pi / sqrt(BigFloat(3, bits)), 190));
  // sum 1/(n+1/2) - 1/(n+1) = 2 log 2
  ClosedForm b = sum_closed_form({{1, mpq_class(1, 2), 1}, {-1, 1, 1}});
  ClosedForm eb;
  eb.add(Atom::log_prime(2), 2);
  CHECK(b == eb);
  // sum 1/(n+1/2)^2 = 3 zeta(2)
  ClosedForm c = sum_closed_form({{1, mpq_class(1, 2), 2}});
  ClosedForm ec;
  ec.add(Atom::zeta(2), 3);
  CHECK(c == ec);
  // sum 1/(n+5/2)^2 = 3 zeta(2) - 4 - 4/9
  ClosedForm c2 = sum_closed_form({{1, mpq_class(5, 2), 2}});
  CHECK(c2.coeff(Atom::one()) == mpq_class(-40, 9));
  // sum 1/(n+1/4)^2 - 1/(n+3/4)^2 = 16 G
  ClosedForm d = sum_closed_form({{1, mpq_class(1, 4), 2}, {-1, mpq_class(3, 4), 2}});
  CHECK(close(eval_closed_form(d, bits), mpval::const_catalan(bits) * 16, 190));
  CHECK(d.coeff(Atom::hurwitz(2, mpq_class(1, 4))) == 1);
  // negative shifts are peeled: sum_{n>=0} 1/(n-1/2)^2 = 4 + 3 zeta(2)
  ClosedForm e = sum_closed_form({{1, mpq_class(-1, 2), 2}});
  CHECK(e.coeff(Atom::one()) == 4);
  CHECK(e.coeff(Atom::zeta(2)) == 3);
}

TEST_CASE("summation errors") {
  CHECK_THROWS_AS(sum_closed_form({{1, 1, 1}}), NonConvergent);
  CHECK_THROWS_AS(sum_closed_form({{1, -2, 2}}), PoleAtIndex);
  CHECK_THROWS_AS(cf_of("n", "1"), NonConvergent);
  CHECK_THROWS_AS(cf_of("n^2", "n^2+1"), Unsupported);
  CHECK_THROWS_AS(cf_of("n^2", "sqrt(2)*(n^2+n)+1"), Unsupported);
}

TEST_CASE("closed form algebra and rendering") {
  ClosedForm x;
  CHECK(render_closed_form(x).empty());
  CHECK(x.empty());
  x.add_log(12, 1);
  CHECK(x.coeff(Atom::log_prime(2)) == 2);
  CHECK(x.coeff(Atom::log_prime(3)) == 1);
  x.add_log(mpq_class(1, 4), 1);
  CHECK(x.coeff(Atom::log_prime(2)) == 0);
  CHECK(render_closed_form(x) == "log(3)");
  CHECK_THROWS_AS(x.add_log(-2, 1), DomainError);

  ClosedForm y;
  y.add(Atom::one(), mpq_class(-1, 2));
  y.add(Atom::zeta(3), mpq_class(3, 4));
  y.add(Atom::digamma(mpq_class(1, 3)), -1);
  y.add(Atom::euler_gamma(), 1);
  CHECK(render_closed_form(y) == "-1/2 + 3/4*zeta(3) + gamma - psi(1/3)");
  ClosedForm z = y * mpq_class(2);
  CHECK(z.coeff(Atom::zeta(3)) == mpq_class(3, 2));
  z += y * mpq_class(-2);
  CHECK(z.empty());

  Bits bits = 200;
  BigFloat v = eval_closed_form(y, bits);
  BigFloat expected = BigFloat(-1, bits) / 2 + mpval::zeta_int(3, bits) * BigFloat(mpq_class(3, 4), bits) +
                      mpval::const_gamma(bits) - mpval::digamma(mpq_class(1, 3), bits);
  CHECK(close(v, expected, 190));
}

TEST_CASE("series term of a spec") {
  RationalFunction t = series_term(CFSpec::parse("n^4", "2*n+1"));
  for (long n = 0; n < 10; ++n) {
    mpq_class expected = mpq_class(1) / (mpq_class((n + 1) * (n + 1) * (n + 1) * (n + 1)) * (2 * n + 1) * (2 * n + 3));
    CHECK(t.eval(mpq_class(n)) == expected);
  }
}
