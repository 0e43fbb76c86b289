#include "doctest.h"

#include "cfforge/errors.hpp"
#include "cfforge/expr.hpp"

#include <random>

using namespace cfforge;
using Kind = Node::Kind;

namespace {

bool close(const BigFloat& a, const BigFloat& b, long bits) {
  BigFloat d = abs(a - b);
  return d.is_zero() || d.log2_abs() < static_cast<double>(-bits);
}

class Generator {
 public:
  explicit Generator(unsigned seed) : rng_(seed) {}

  Expr any(int depth) {
    int pick = uniform(0, depth <= 0 ? 4 : 13);
    switch (pick) {
      case 0: return expr::integer(uniform(-30, 30));
      case 1: return expr::rational(mpq_class(uniform(-30, 30), uniform(1, 9)));
      case 2:
      case 3: return expr::var();
      case 4: return uniform(0, 1) ? expr::constant(static_cast<NamedConst>(uniform(0, 3))) : expr::zeta(uniform(2, 9));
      case 5: return expr::neg(any(depth - 1));
      case 6: return expr::add(any(depth - 1), any(depth - 1));
      case 7: return expr::sub(any(depth - 1), any(depth - 1));
      case 8: return expr::mul(any(depth - 1), any(depth - 1));
      case 9: return expr::div(any(depth - 1), any(depth - 1));
      case 10: return expr::pow(any(depth - 1), uniform(-4, 4));
      case 11: return expr::func(static_cast<mpval::Fn>(uniform(0, 7)), any(depth - 1));
      default: return expr::mul(any(depth - 1), expr::var());
    }
  }

  // rational expressions in n only
  Expr rational(int depth) {
    int pick = uniform(0, depth <= 0 ? 2 : 8);
    switch (pick) {
      case 0: return expr::integer(uniform(-9, 9));
      case 1: return expr::rational(mpq_class(uniform(-9, 9), uniform(1, 5)));
      case 2: return expr::var();
      case 3: return expr::neg(rational(depth - 1));
      case 4: return expr::add(rational(depth - 1), rational(depth - 1));
      case 5: return expr::sub(rational(depth - 1), rational(depth - 1));
      case 6: return expr::mul(rational(depth - 1), rational(depth - 1));
      case 7: return expr::div(rational(depth - 1), expr::add(rational(depth - 1), expr::rational(mpq_class(1, 7))));
      default: return expr::pow(rational(depth - 1), uniform(-2, 3));
    }
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("parse shapes") {
  Expr e = parse("n^4");
  REQUIRE(e->kind == Kind::Pow);
  CHECK(e->exponent == 4);
  CHECK(e->lhs->kind == Kind::Var);

  Expr x = parse("exp(-2*n-8)*n^3");
  REQUIRE(x->kind == Kind::Mul);
  CHECK(x->lhs->kind == Kind::Func);
  CHECK(x->lhs->fn == mpval::Fn::Exp);
  CHECK(x->rhs->kind == Kind::Pow);

  Expr c = parse("zeta(3)-pi^2/6+1");
  CHECK_FALSE(contains_var(c));

  CHECK(render(parse("-n^2")) == "-n^2");
  CHECK(parse("-n^2")->kind == Kind::Neg);
  CHECK(parse("2^3^2")->value == 64);  // left associative
  CHECK(parse("n^-2")->exponent == -2);
  CHECK(parse("n^(-2)")->exponent == -2);
  CHECK(parse("1/2")->kind == Kind::Rat);
  CHECK(parse("z+v", {true})->lhs->kind == Kind::Var);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("1.5*n"), SyntaxError);
  CHECK_THROWS_AS(parse("n^n"), SyntaxError);
  CHECK_THROWS_AS(parse("zeta(1)"), SyntaxError);
  CHECK_THROWS_AS(parse("zeta(n)"), SyntaxError);
  CHECK_THROWS_AS(parse("(n+1"), SyntaxError);
  CHECK_THROWS_AS(parse("n+"), SyntaxError);
  CHECK_THROWS_AS(parse("z"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("foo(n)"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("pi(2)"), SyntaxError);
  try {
    parse("n + 2.5");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& err) {
    CHECK(err.offset() == 5);
  }
  try {
    parse("n*qq");
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& err) {
    CHECK(err.offset() == 2);
    CHECK(err.name() == "qq");
  }
}

TEST_CASE("render") {
  CHECK(render(expr::pow(expr::var(), 4)) == "n^4");
  CHECK(render(parse("2*n+1")) == "2*n+1");
  CHECK(render(parse("(1+2*3)")) == "7");
  CHECK(render(expr::add(expr::var(), expr::integer(-3))) == "n+(-3)");
  CHECK(render(expr::mul(expr::var(), expr::rational(mpq_class(1, 2)))) == "n*(1/2)");
  CHECK(render(expr::pow(expr::neg(expr::var()), 2)) == "(-n)^2");
  CHECK(render(expr::pow(expr::var(), -2)) == "n^(-2)");
  CHECK(render(parse("n-(n-1)")) == "n-(n-1)");
  CHECK(render(parse("-(n*2)")) == "-(n*2)");
}

TEST_CASE("round trip on random trees") {
  Generator gen(2024);
  for (int i = 0; i < 1500; ++i) {
    Expr raw = gen.any(gen.uniform(0, 5));
    Expr norm = normalize(raw);
    std::string text = render(raw);
    CAPTURE(text);
    Expr back = parse(text);
    CHECK(structurally_equal(back, norm));
    CHECK(structurally_equal(parse(render(back)), back));
    CHECK(structurally_equal(normalize(norm), norm));
  }
}

TEST_CASE("exact evaluation") {
  CHECK(*eval_rational(parse("n^2"), 3) == 9);
  CHECK_FALSE(eval_rational(parse("sqrt(2)*(n^2+n)+1"), 1).has_value());
  CHECK(*eval_rational(parse("sqrt(9/4)*n"), 2) == 3);
  CHECK_THROWS_AS(eval_rational(parse("1/(n-2)"), 2), DivisionByZero);
  try {
    eval_rational(parse("n+1/(n-2)"), 2);
  } catch (const DivisionByZero& err) {
    CHECK(err.subterm() == "1/(n-2)");
  }

  // b_n for f = n^4, g = 2n + 1 through substitution, against the expanded form
  Expr f = parse("n^4");
  Expr g = parse("2*n+1");
  Expr b = expr::div(expr::add(expr::mul(shift(f, 1), shift(g, 1)), expr::mul(f, shift(g, -1))), g);
  Expr b_theorem = parse("n^4+(n+1)^4+2*(n^2+(n+1)^2)");
  CHECK(*eval_rational(b, 1) == 27);
  for (long n = 0; n <= 20; ++n) CHECK(*eval_rational(b, n) == *eval_rational(b_theorem, n));
}

TEST_CASE("float evaluation") {
  Bits bits = 200;
  CHECK(close(eval_float(parse("pi^2/6"), bits), mpval::zeta_int(2, bits), 195));
  BigFloat v = eval_float(parse("exp(9)*zeta(3)"), bits);
  CHECK(v.to_string(12).substr(0, 10) == "9740.36797");
  CHECK(eval_float(parse("n+1"), BigFloat(0, bits), bits) == BigFloat(1, bits));
  CHECK_THROWS_AS(eval_float(parse("log(n)"), BigFloat(0, bits), bits), DomainError);
  CHECK_THROWS_AS(eval_float(parse("1/(n-1)"), BigFloat(1, bits), bits), DivisionByZero);
  CHECK_THROWS_AS(eval_float(parse("cot(0)"), bits), DomainError);
}

TEST_CASE("exact and float evaluation agree") {
  Generator gen(99);
  Bits bits = 128;
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Expr e = normalize(gen.rational(4));
    mpq_class n = gen.uniform(0, 100);
    std::optional<mpq_class> exact;
    try {
      exact = eval_rational(e, n);
    } catch (const DivisionByZero&) {
      continue;
    }
    REQUIRE(exact.has_value());
    BigFloat approx = eval_float(e, BigFloat(n, bits), bits);
    BigFloat x(*exact, bits);
    BigFloat scale = abs(x) > BigFloat(1, bits) ? abs(x) : BigFloat(1, bits);
    CHECK(close(approx / scale, x / scale, bits - 32));
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("rational functions from expressions") {
  auto r = as_rational_function(parse("n^4"));
  REQUIRE(r);
  CHECK(r->num() == QPolynomial{0, 0, 0, 0, 1});
  CHECK(r->den() == QPolynomial{1});
  auto q = as_rational_function(parse("n^4/(n+2)"));
  REQUIRE(q);
  CHECK(q->num() == QPolynomial{0, 0, 0, 0, 1});
  CHECK(q->den() == QPolynomial{2, 1});
  CHECK_FALSE(as_rational_function(parse("exp(n)")).has_value());

  Generator gen(5);
  for (int i = 0; i < 200; ++i) {
    Expr e = normalize(gen.rational(4));
    auto rf = as_rational_function(e);
    if (!rf) continue;  // identically zero divisor somewhere
    for (long n = 0; n <= 20; ++n) {
      std::optional<mpq_class> direct;
      bool pole = false;
      try {
        direct = eval_rational(e, n);
      } catch (const DivisionByZero&) {
        pole = true;
      }
      if (pole || sgn(rf->den().eval(mpq_class(n))) == 0) continue;
      CHECK(rf->eval(mpq_class(n)) == *direct);
    }
  }
}
