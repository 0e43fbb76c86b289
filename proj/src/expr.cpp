#include "cfforge/expr.hpp"

#include "cfforge/errors.hpp"

#include <cctype>
#include <functional>
#include <utility>

namespace cfforge {

namespace expr {

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Expr binary(Node::Kind kind, Expr a, Expr b) {
  Node n;
  n.kind = kind;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

}  // namespace

Expr integer(const mpz_class& v) {
  Node n;
  n.kind = Node::Kind::Int;
  n.value = v;
  return make(std::move(n));
}

Expr rational(const mpq_class& v) {
  mpq_class c = v;
  c.canonicalize();
  if (c.get_den() == 1) return integer(c.get_num());
  Node n;
  n.kind = Node::Kind::Rat;
  n.value = c;
  return make(std::move(n));
}

Expr var() {
  Node n;
  n.kind = Node::Kind::Var;
  return make(std::move(n));
}

Expr constant(NamedConst c) {
  Node n;
  n.kind = Node::Kind::Const;
  n.constant = c;
  return make(std::move(n));
}

Expr zeta(int k) {
  Node n;
  n.kind = Node::Kind::Zeta;
  n.zeta_k = k;
  return make(std::move(n));
}

Expr func(mpval::Fn fn, Expr arg) {
  Node n;
  n.kind = Node::Kind::Func;
  n.fn = fn;
  n.lhs = std::move(arg);
  return make(std::move(n));
}

Expr neg(Expr a) {
  Node n;
  n.kind = Node::Kind::Neg;
  n.lhs = std::move(a);
  return make(std::move(n));
}

Expr add(Expr a, Expr b) { return binary(Node::Kind::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return binary(Node::Kind::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return binary(Node::Kind::Mul, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return binary(Node::Kind::Div, std::move(a), std::move(b)); }

Expr pow(Expr base, long exponent) {
  Node n;
  n.kind = Node::Kind::Pow;
  n.lhs = std::move(base);
  n.exponent = exponent;
  return make(std::move(n));
}

}  // namespace expr

namespace {

using Kind = Node::Kind;

bool is_literal(const Expr& e) { return e->kind == Kind::Int || e->kind == Kind::Rat; }

const char* const_name(NamedConst c) {
  switch (c) {
    case NamedConst::Pi: return "pi";
    case NamedConst::Gamma: return "gamma";
    case NamedConst::Catalan: return "catalan";
    case NamedConst::E: return "e";
  }
  return "?";
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(const std::string& text, ParseOptions options) : text_(text), options_(options) {}

  Expr run() {
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (static_cast<unsigned char>(text_[i]) > 127) throw SyntaxError("non-ASCII character", i);
    }
    skip();
    if (at_end()) throw SyntaxError("empty expression", pos_);
    Expr e = parse_sum();
    skip();
    if (!at_end()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      std::string got = at_end() ? "end of input" : std::string("'") + peek() + "'";
      throw SyntaxError(std::string("expected '") + c + "' but found " + got, pos_);
    }
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = expr::add(lhs, parse_product());
      } else if (accept('-')) {
        lhs = expr::sub(lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = expr::mul(lhs, parse_unary());
      } else if (accept('/')) {
        lhs = expr::div(lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return expr::neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (accept('^')) base = expr::pow(base, parse_exponent());
    return base;
  }

  long parse_exponent() {
    skip();
    bool paren = accept('(');
    skip();
    bool negative = false;
    if (accept('-')) {
      negative = true;
    } else {
      accept('+');
    }
    skip();
    std::size_t start = pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      throw SyntaxError("exponent must be an integer literal", pos_);
    }
    mpz_class v = read_integer();
    if (peek() == '.') throw SyntaxError("decimal literals are not supported", pos_);
    if (!v.fits_slong_p()) throw SyntaxError("exponent too large", start);
    if (paren) expect(')');
    long k = v.get_si();
    return negative ? -k : k;
  }

  mpz_class read_integer() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    return mpz_class(text_.substr(start, pos_ - start));
  }

  Expr parse_primary() {
    skip();
    std::size_t start = pos_;
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class v = read_integer();
      if (peek() == '.' || peek() == 'e' || peek() == 'E') {
        if (peek() == '.') throw SyntaxError("decimal literals are not supported", pos_);
        if (pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
          throw SyntaxError("decimal literals are not supported", pos_);
        }
      }
      return expr::integer(v);
    }
    if (c == '.') throw SyntaxError("decimal literals are not supported", pos_);
    if (accept('(')) {
      Expr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      return parse_identifier(name, start);
    }
    if (at_end()) throw SyntaxError("unexpected end of input", pos_);
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr parse_identifier(const std::string& name, std::size_t start) {
    if (name == "n" || (options_.variable_aliases && (name == "z" || name == "v"))) return no_call(expr::var(), name);
    if (name == "pi") return no_call(expr::constant(NamedConst::Pi), name);
    if (name == "gamma") return no_call(expr::constant(NamedConst::Gamma), name);
    if (name == "catalan") return no_call(expr::constant(NamedConst::Catalan), name);
    if (name == "e") return no_call(expr::constant(NamedConst::E), name);
    static const std::pair<const char*, mpval::Fn> kFns[] = {
        {"sqrt", mpval::Fn::Sqrt}, {"exp", mpval::Fn::Exp},   {"log", mpval::Fn::Log},
        {"tanh", mpval::Fn::Tanh}, {"coth", mpval::Fn::Coth}, {"tan", mpval::Fn::Tan},
        {"cot", mpval::Fn::Cot},   {"atanh", mpval::Fn::Atanh}};
    for (const auto& [fname, fn] : kFns) {
      if (name == fname) {
        expect('(');
        Expr arg = parse_sum();
        expect(')');
        return expr::func(fn, arg);
      }
    }
    if (name == "zeta") {
      expect('(');
      skip();
      std::size_t at = pos_;
      Expr arg = normalize(parse_sum());
      expect(')');
      if (arg->kind != Kind::Int || arg->value < 2 || arg->value > 100000) {
        throw SyntaxError("zeta argument must be an integer literal >= 2", at);
      }
      return expr::zeta(static_cast<int>(arg->value.get_num().get_si()));
    }
    throw UnknownIdentifier(name, start);
  }

  Expr no_call(Expr e, const std::string& name) {
    skip();
    if (peek() == '(') throw SyntaxError("'" + name + "' is not a function", pos_);
    return e;
  }

  const std::string& text_;
  ParseOptions options_;
  std::size_t pos_ = 0;
};

// ------------------------------------------------------------ rendering

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

int precedence(const Expr& e) {
  switch (e->kind) {
    case Kind::Int: return sgn(e->value) < 0 ? kPrecUnary : kPrecAtom;
    case Kind::Rat: return kPrecProduct;
    case Kind::Neg: return kPrecUnary;
    case Kind::Add:
    case Kind::Sub: return kPrecSum;
    case Kind::Mul:
    case Kind::Div: return kPrecProduct;
    case Kind::Pow: return kPrecPower;
    default: return kPrecAtom;
  }
}

bool negative_lead(const Expr& e) {
  return e->kind == Kind::Neg || ((e->kind == Kind::Int || e->kind == Kind::Rat) && sgn(e->value) < 0);
}

std::string render_node(const Expr& e);

std::string wrap(const Expr& e, bool paren) { return paren ? "(" + render_node(e) + ")" : render_node(e); }

std::string render_node(const Expr& e) {
  switch (e->kind) {
    case Kind::Int:
    case Kind::Rat: return e->value.get_str();
    case Kind::Var: return "n";
    case Kind::Const: return const_name(e->constant);
    case Kind::Zeta: return "zeta(" + std::to_string(e->zeta_k) + ")";
    case Kind::Func: return std::string(mpval::fn_name(e->fn)) + "(" + render_node(e->lhs) + ")";
    case Kind::Neg: return "-" + wrap(e->lhs, precedence(e->lhs) < kPrecPower || negative_lead(e->lhs));
    case Kind::Pow: {
      std::string base = wrap(e->lhs, precedence(e->lhs) < kPrecAtom || negative_lead(e->lhs));
      std::string k = e->exponent < 0 ? "(" + std::to_string(e->exponent) + ")" : std::to_string(e->exponent);
      return base + "^" + k;
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      int p = precedence(e);
      const char* op = e->kind == Kind::Add ? "+" : e->kind == Kind::Sub ? "-" : e->kind == Kind::Mul ? "*" : "/";
      std::string left = wrap(e->lhs, precedence(e->lhs) < p);
      std::string right = wrap(e->rhs, precedence(e->rhs) <= p || negative_lead(e->rhs));
      return left + op + right;
    }
  }
  return "?";
}

// ------------------------------------------------------------ folding

constexpr double kMaxFoldBits = 1e6;

Expr fold(const Expr& e) {
  switch (e->kind) {
    case Kind::Int:
    case Kind::Rat:
    case Kind::Var:
    case Kind::Const:
    case Kind::Zeta: return e;
    case Kind::Func: {
      Expr a = fold(e->lhs);
      return a == e->lhs ? e : expr::func(e->fn, a);
    }
    case Kind::Neg: {
      Expr a = fold(e->lhs);
      if (is_literal(a)) return expr::rational(-a->value);
      if (a->kind == Kind::Neg) return a->lhs;
      return a == e->lhs ? e : expr::neg(a);
    }
    case Kind::Pow: {
      Expr a = fold(e->lhs);
      if (is_literal(a)) {
        const mpq_class& v = a->value;
        bool zero = sgn(v) == 0;
        double bits = static_cast<double>(mpz_sizeinbase(v.get_num_mpz_t(), 2) + mpz_sizeinbase(v.get_den_mpz_t(), 2));
        if (!(zero && e->exponent < 0) && bits * std::abs(static_cast<double>(e->exponent)) < kMaxFoldBits) {
          unsigned long k = static_cast<unsigned long>(std::abs(e->exponent));
          mpz_class num;
          mpz_class den;
          mpz_pow_ui(num.get_mpz_t(), v.get_num_mpz_t(), k);
          mpz_pow_ui(den.get_mpz_t(), v.get_den_mpz_t(), k);
          mpq_class r = e->exponent >= 0 ? mpq_class(num, den) : mpq_class(den, num);
          r.canonicalize();
          return expr::rational(r);
        }
      }
      return a == e->lhs ? e : expr::pow(a, e->exponent);
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      Expr a = fold(e->lhs);
      Expr b = fold(e->rhs);
      if (is_literal(a) && is_literal(b)) {
        const mpq_class& x = a->value;
        const mpq_class& y = b->value;
        switch (e->kind) {
          case Kind::Add: return expr::rational(x + y);
          case Kind::Sub: return expr::rational(x - y);
          case Kind::Mul: return expr::rational(x * y);
          default:
            if (sgn(y) != 0) return expr::rational(x / y);
        }
      }
      if (a == e->lhs && b == e->rhs) return e;
      Node n;
      n.kind = e->kind;
      n.lhs = a;
      n.rhs = b;
      return std::make_shared<const Node>(std::move(n));
    }
  }
  return e;
}

// ------------------------------------------------------------ evaluation

std::optional<mpq_class> exact_sqrt(const mpq_class& v) {
  if (sgn(v) < 0) return std::nullopt;
  if (mpz_perfect_square_p(v.get_num_mpz_t()) == 0 || mpz_perfect_square_p(v.get_den_mpz_t()) == 0) {
    return std::nullopt;
  }
  mpz_class a;
  mpz_class b;
  mpz_sqrt(a.get_mpz_t(), v.get_num_mpz_t());
  mpz_sqrt(b.get_mpz_t(), v.get_den_mpz_t());
  return mpq_class(a, b);
}

mpq_class rational_power(const mpq_class& x, long k, const Expr& where) {
  if (sgn(x) == 0 && k < 0) throw DivisionByZero(render(where));
  unsigned long u = static_cast<unsigned long>(std::abs(k));
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), x.get_num_mpz_t(), u);
  mpz_pow_ui(den.get_mpz_t(), x.get_den_mpz_t(), u);
  mpq_class r = k >= 0 ? mpq_class(num, den) : mpq_class(den, num);
  r.canonicalize();
  return r;
}

std::optional<mpq_class> exact(const Expr& e, const std::optional<mpq_class>& n) {
  switch (e->kind) {
    case Kind::Int:
    case Kind::Rat: return e->value;
    case Kind::Var:
      if (!n) throw DomainError("expression depends on n but no value was given");
      return *n;
    case Kind::Const:
    case Kind::Zeta: return std::nullopt;
    case Kind::Func: {
      auto a = exact(e->lhs, n);
      if (!a) return std::nullopt;
      if (e->fn == mpval::Fn::Sqrt) return exact_sqrt(*a);
      return std::nullopt;
    }
    case Kind::Neg: {
      auto a = exact(e->lhs, n);
      if (!a) return std::nullopt;
      return mpq_class(-*a);
    }
    case Kind::Pow: {
      auto a = exact(e->lhs, n);
      if (!a) return std::nullopt;
      return rational_power(*a, e->exponent, e);
    }
    case Kind::Div: {
      auto b = exact(e->rhs, n);
      if (b && sgn(*b) == 0) throw DivisionByZero(render(e));
      auto a = exact(e->lhs, n);
      if (!a || !b) return std::nullopt;
      return mpq_class(*a / *b);
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul: {
      auto a = exact(e->lhs, n);
      auto b = exact(e->rhs, n);
      if (!a || !b) return std::nullopt;
      if (e->kind == Kind::Add) return mpq_class(*a + *b);
      if (e->kind == Kind::Sub) return mpq_class(*a - *b);
      return mpq_class(*a * *b);
    }
  }
  return std::nullopt;
}

BigFloat named_constant(NamedConst c, Bits bits) {
  switch (c) {
    case NamedConst::Pi: return mpval::const_pi(bits);
    case NamedConst::Gamma: return mpval::const_gamma(bits);
    case NamedConst::Catalan: return mpval::const_catalan(bits);
    case NamedConst::E: return mpval::const_e(bits);
  }
  return BigFloat(bits);
}

BigFloat approx(const Expr& e, const BigFloat* n, Bits w) {
  switch (e->kind) {
    case Kind::Int:
    case Kind::Rat: return BigFloat(e->value, w);
    case Kind::Var:
      if (n == nullptr) throw DomainError("expression depends on n but no value was given");
      return n->rounded(w);
    case Kind::Const: return named_constant(e->constant, w);
    case Kind::Zeta: return mpval::zeta_int(e->zeta_k, w);
    case Kind::Func: return mpval::elem(e->fn, approx(e->lhs, n, w));
    case Kind::Neg: return -approx(e->lhs, n, w);
    case Kind::Pow: {
      BigFloat a = approx(e->lhs, n, w);
      if (a.is_zero() && e->exponent < 0) throw DivisionByZero(render(e));
      return pow(a, e->exponent);
    }
    case Kind::Add: return approx(e->lhs, n, w) + approx(e->rhs, n, w);
    case Kind::Sub: return approx(e->lhs, n, w) - approx(e->rhs, n, w);
    case Kind::Mul: return approx(e->lhs, n, w) * approx(e->rhs, n, w);
    case Kind::Div: {
      BigFloat b = approx(e->rhs, n, w);
      if (b.is_zero()) throw DivisionByZero(render(e));
      return approx(e->lhs, n, w) / b;
    }
  }
  return BigFloat(w);
}

std::optional<RationalFunction> to_rational(const Expr& e) {
  switch (e->kind) {
    case Kind::Int:
    case Kind::Rat: return RationalFunction(QPolynomial::constant(e->value));
    case Kind::Var: return RationalFunction(QPolynomial::monomial(1, 1));
    case Kind::Const:
    case Kind::Zeta: return std::nullopt;
    case Kind::Func: {
      if (e->fn != mpval::Fn::Sqrt || contains_var(e->lhs)) return std::nullopt;
      auto a = exact(e->lhs, std::nullopt);
      if (!a) return std::nullopt;
      auto r = exact_sqrt(*a);
      if (!r) return std::nullopt;
      return RationalFunction(QPolynomial::constant(*r));
    }
    case Kind::Neg: {
      auto a = to_rational(e->lhs);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Kind::Pow: {
      auto a = to_rational(e->lhs);
      if (!a) return std::nullopt;
      if (std::abs(e->exponent) > 4096) return std::nullopt;
      return pow(*a, static_cast<int>(e->exponent));
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      auto a = to_rational(e->lhs);
      if (!a) return std::nullopt;
      auto b = to_rational(e->rhs);
      if (!b) return std::nullopt;
      if (e->kind == Kind::Add) return *a + *b;
      if (e->kind == Kind::Sub) return *a - *b;
      if (e->kind == Kind::Mul) return *a * *b;
      return *a / *b;
    }
  }
  return std::nullopt;
}

}  // namespace

Expr parse(const std::string& text, ParseOptions options) { return normalize(Parser(text, options).run()); }

std::string render(const Expr& e) { return render_node(e); }

Expr normalize(const Expr& e) { return fold(e); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Int:
    case Kind::Rat: return a->value == b->value;
    case Kind::Var: return true;
    case Kind::Const: return a->constant == b->constant;
    case Kind::Zeta: return a->zeta_k == b->zeta_k;
    case Kind::Func: return a->fn == b->fn && structurally_equal(a->lhs, b->lhs);
    case Kind::Neg: return structurally_equal(a->lhs, b->lhs);
    case Kind::Pow: return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

bool contains_var(const Expr& e) {
  if (!e) return false;
  if (e->kind == Kind::Var) return true;
  return contains_var(e->lhs) || contains_var(e->rhs);
}

std::optional<mpq_class> eval_rational(const Expr& e, const mpq_class& n) { return exact(e, n); }

std::optional<mpq_class> eval_rational(const Expr& e) { return exact(e, std::nullopt); }

BigFloat eval_float(const Expr& e, const BigFloat& n, Bits bits) {
  return approx(e, &n, bits + mpval::kGuardBits).rounded(bits);
}

BigFloat eval_float(const Expr& e, Bits bits) { return approx(e, nullptr, bits + mpval::kGuardBits).rounded(bits); }

std::optional<RationalFunction> as_rational_function(const Expr& e) {
  try {
    return to_rational(e);
  } catch (const DivisionByZero&) {
    return std::nullopt;
  }
}

Expr substitute(const Expr& e, const Expr& replacement) {
  switch (e->kind) {
    case Kind::Var: return replacement;
    case Kind::Int:
    case Kind::Rat:
    case Kind::Const:
    case Kind::Zeta: return e;
    case Kind::Func: return expr::func(e->fn, substitute(e->lhs, replacement));
    case Kind::Neg: return expr::neg(substitute(e->lhs, replacement));
    case Kind::Pow: return expr::pow(substitute(e->lhs, replacement), e->exponent);
    default: {
      Node n;
      n.kind = e->kind;
      n.lhs = substitute(e->lhs, replacement);
      n.rhs = substitute(e->rhs, replacement);
      return std::make_shared<const Node>(std::move(n));
    }
  }
}

Expr shift(const Expr& e, long k) {
  if (k == 0) return e;
  Expr r = k > 0 ? expr::add(expr::var(), expr::integer(k)) : expr::sub(expr::var(), expr::integer(-k));
  return substitute(e, r);
}

}  // namespace cfforge
