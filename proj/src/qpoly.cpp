#include "cfforge/qpoly.hpp"

#include "cfforge/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace cfforge {

QPolynomial::QPolynomial(std::vector<mpq_class> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

QPolynomial::QPolynomial(std::initializer_list<long> coeffs) {
  for (long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

QPolynomial QPolynomial::constant(const mpq_class& c) { return QPolynomial(std::vector<mpq_class>{c}); }

QPolynomial QPolynomial::monomial(const mpq_class& c, int degree) {
  std::vector<mpq_class> v(static_cast<std::size_t>(degree) + 1);
  v.back() = c;
  return QPolynomial(std::move(v));
}

QPolynomial QPolynomial::linear(const mpq_class& a) { return QPolynomial(std::vector<mpq_class>{a, mpq_class(1)}); }

void QPolynomial::trim() {
  while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
}

mpq_class QPolynomial::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return coeffs_[static_cast<std::size_t>(i)];
}

mpq_class QPolynomial::leading() const { return is_zero() ? mpq_class(0) : coeffs_.back(); }

mpq_class QPolynomial::eval(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

BigFloat QPolynomial::eval(const BigFloat& x) const {
  Bits bits = x.precision();
  BigFloat acc(bits);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + BigFloat(*it, bits);
  return acc;
}

QPolynomial QPolynomial::shifted(const mpq_class& s) const {
  // Horner in the ring: acc = acc * (n + s) + c
  QPolynomial acc;
  QPolynomial lin = linear(s);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= lin;
    acc += constant(*it);
  }
  return acc;
}

QPolynomial QPolynomial::scaled(const mpq_class& c) const {
  std::vector<mpq_class> v = coeffs_;
  mpq_class power = 1;
  for (auto& x : v) {
    x *= power;
    power *= c;
  }
  return QPolynomial(std::move(v));
}

QPolynomial QPolynomial::derivative() const {
  if (degree() < 1) return {};
  std::vector<mpq_class> v(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) v[i - 1] = coeffs_[i] * static_cast<long>(i);
  return QPolynomial(std::move(v));
}

QPolynomial QPolynomial::monic() const {
  if (is_zero()) return {};
  QPolynomial out = *this;
  mpq_class inv = 1 / leading();
  return out *= inv;
}

mpz_class QPolynomial::denominator_lcm() const {
  mpz_class l = 1;
  for (const auto& c : coeffs_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

QPolynomial QPolynomial::primitive() const {
  if (is_zero()) return {};
  mpz_class l = denominator_lcm();
  std::vector<mpz_class> ints;
  mpz_class g = 0;
  for (const auto& c : coeffs_) {
    mpz_class v = c.get_num() * (l / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    ints.push_back(v);
  }
  if (sgn(ints.back()) < 0) g = -g;
  std::vector<mpq_class> v;
  v.reserve(ints.size());
  for (auto& x : ints) v.emplace_back(x / g);
  return QPolynomial(std::move(v));
}

std::string QPolynomial::render(const std::string& var) const {
  if (is_zero()) return "0";
  std::string out;
  for (int i = degree(); i >= 0; --i) {
    mpq_class c = coeff(i);
    if (sgn(c) == 0) continue;
    bool negative = sgn(c) < 0;
    mpq_class a = abs(c);
    std::string mono;
    if (i == 0) {
      mono = a.get_str();
    } else {
      std::string power = i == 1 ? var : var + "^" + std::to_string(i);
      mono = a == 1 ? power : a.get_str() + "*" + power;
    }
    if (out.empty()) {
      out = negative ? "-" + mono : mono;
    } else {
      out += negative ? "-" : "+";
      out += mono;
    }
  }
  return out;
}

QPolynomial QPolynomial::operator-() const {
  QPolynomial out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

QPolynomial& QPolynomial::operator+=(const QPolynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  trim();
  return *this;
}

QPolynomial& QPolynomial::operator-=(const QPolynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  trim();
  return *this;
}

QPolynomial& QPolynomial::operator*=(const QPolynomial& rhs) {
  if (is_zero() || rhs.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<mpq_class> v(coeffs_.size() + rhs.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (sgn(coeffs_[i]) == 0) continue;
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * rhs.coeffs_[j];
  }
  coeffs_ = std::move(v);
  trim();
  return *this;
}

QPolynomial& QPolynomial::operator*=(const mpq_class& rhs) {
  if (sgn(rhs) == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& c : coeffs_) c *= rhs;
  return *this;
}

QPolynomial pow(const QPolynomial& p, int k) {
  if (k < 0) throw std::domain_error("negative polynomial power");
  QPolynomial out = QPolynomial::constant(1);
  QPolynomial base = p;
  while (k > 0) {
    if (k & 1) out *= base;
    k >>= 1;
    if (k > 0) base *= base;
  }
  return out;
}

std::pair<QPolynomial, QPolynomial> divmod(const QPolynomial& a, const QPolynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<mpq_class> rem = a.coeffs();
  int db = b.degree();
  int da = a.degree();
  if (da < db) return {QPolynomial(), a};
  std::vector<mpq_class> quot(static_cast<std::size_t>(da - db) + 1);
  mpq_class lead = b.leading();
  for (int i = da; i >= db; --i) {
    mpq_class c = rem[static_cast<std::size_t>(i)] / lead;
    quot[static_cast<std::size_t>(i - db)] = c;
    if (sgn(c) == 0) continue;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(i - db + j)] -= c * b.coeff(j);
  }
  rem.resize(static_cast<std::size_t>(db));
  return {QPolynomial(std::move(quot)), QPolynomial(std::move(rem))};
}

QPolynomial gcd(const QPolynomial& a, const QPolynomial& b) {
  QPolynomial x = a;
  QPolynomial y = b;
  while (!y.is_zero()) {
    QPolynomial r = divmod(x, y).second;
    // keep intermediate sizes in check
    x = std::move(y);
    y = r.is_zero() ? r : r.primitive();
  }
  return x.monic();
}

std::vector<SquareFreeFactor> square_free(const QPolynomial& p) {
  std::vector<SquareFreeFactor> out;
  if (p.degree() < 1) return out;
  QPolynomial f = p.monic();
  QPolynomial d = f.derivative();
  QPolynomial a = gcd(f, d);
  QPolynomial b = divmod(f, a).first;
  QPolynomial c = divmod(d, a).first;
  QPolynomial dd = c - b.derivative();
  for (int i = 1; b.degree() > 0; ++i) {
    QPolynomial g = gcd(b, dd);
    if (g.degree() > 0) out.push_back({g, i});
    b = divmod(b, g).first;
    c = divmod(dd, g).first;
    dd = c - b.derivative();
  }
  return out;
}

namespace {

std::vector<QPolynomial> sturm_sequence(const QPolynomial& p) {
  std::vector<QPolynomial> seq{p.primitive(), p.derivative().primitive()};
  while (seq.back().degree() > 0) {
    QPolynomial r = divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    // Only signs matter: scale by a positive rational to keep integers small.
    QPolynomial prim = r.primitive();
    if (sgn(r.leading()) > 0) prim = -prim;
    seq.push_back(prim);
  }
  return seq;
}

int sign_changes(const std::vector<QPolynomial>& seq, const mpq_class& x) {
  int changes = 0;
  int last = 0;
  for (const auto& s : seq) {
    int v = sgn(s.eval(x));
    if (v == 0) continue;
    if (last != 0 && v != last) ++changes;
    last = v;
  }
  return changes;
}

/// Cauchy bound: every real root has |x| < bound.
mpq_class root_bound(const QPolynomial& p) {
  mpq_class m = 0;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, mpq_class(abs(p.coeff(i) / p.leading())));
  return m + 1;
}

}  // namespace

int count_real_roots(const QPolynomial& p, const mpq_class& a, const mpq_class& b) {
  if (p.degree() < 1) return 0;
  QPolynomial sf = divmod(p, gcd(p, p.derivative())).first;
  auto seq = sturm_sequence(sf);
  return sign_changes(seq, a) - sign_changes(seq, b);
}

std::vector<mpq_class> rational_roots(const QPolynomial& p) {
  std::vector<mpq_class> roots;
  if (p.degree() < 1) return roots;
  QPolynomial sf = divmod(p, gcd(p, p.derivative())).first.primitive();
  if (sgn(sf.coeff(0)) == 0) {
    roots.emplace_back(0);
    sf = divmod(sf, QPolynomial::monomial(1, 1)).first;
  }
  if (sf.degree() < 1) return roots;
  // Every rational root of a primitive integer polynomial is k / lead.
  mpz_class lead = sf.leading().get_num();
  mpq_class step(mpz_class(1), lead);
  auto seq = sturm_sequence(sf);
  mpq_class bound = root_bound(sf);
  struct Interval {
    mpq_class lo, hi;
    int count;
  };
  std::vector<Interval> work;
  int total = sign_changes(seq, -bound) - sign_changes(seq, bound);
  if (total > 0) work.push_back({-bound, bound, total});
  while (!work.empty()) {
    Interval iv = work.back();
    work.pop_back();
    if (iv.count == 0) continue;
    if (iv.hi - iv.lo < step) {
      // at most one multiple of 1/lead lies inside
      mpz_class k;
      mpq_class scaled = iv.lo * lead;
      mpz_fdiv_q(k.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      for (int d = 0; d <= 1; ++d) {
        mpq_class cand(k + d, lead);
        cand.canonicalize();
        if (cand > iv.lo && cand < iv.hi && sgn(sf.eval(cand)) == 0) roots.push_back(cand);
      }
      continue;
    }
    mpq_class mid = (iv.lo + iv.hi) / 2;
    // nudge the split point off any root
    for (int t = 1; sgn(sf.eval(mid)) == 0; ++t) mid = iv.lo + (iv.hi - iv.lo) * mpq_class(t, 2 * t + 1 + t * t);
    int left = sign_changes(seq, iv.lo) - sign_changes(seq, mid);
    work.push_back({iv.lo, mid, left});
    work.push_back({mid, iv.hi, iv.count - left});
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

RationalFunction::RationalFunction() : num_(), den_(QPolynomial::constant(1)) {}

RationalFunction::RationalFunction(const QPolynomial& num) : num_(num), den_(QPolynomial::constant(1)) {}

RationalFunction::RationalFunction(QPolynomial num, QPolynomial den) {
  if (den.is_zero()) throw DivisionByZero("rational function with zero denominator");
  if (num.is_zero()) {
    num_ = QPolynomial();
    den_ = QPolynomial::constant(1);
    return;
  }
  QPolynomial g = gcd(num, den);
  if (g.degree() > 0) {
    num = divmod(num, g).first;
    den = divmod(den, g).first;
  }
  mpq_class lead = den.leading();
  num_ = num * (1 / lead);
  den_ = den.monic();
}

mpq_class RationalFunction::eval(const mpq_class& x) const {
  mpq_class d = den_.eval(x);
  if (sgn(d) == 0) throw DivisionByZero(render() + " at n = " + x.get_str());
  return num_.eval(x) / d;
}

BigFloat RationalFunction::eval(const BigFloat& x) const {
  BigFloat d = den_.eval(x);
  if (d.is_zero()) throw DivisionByZero(render());
  return num_.eval(x) / d;
}

RationalFunction RationalFunction::shifted(const mpq_class& s) const {
  return RationalFunction(num_.shifted(s), den_.shifted(s));
}

std::string RationalFunction::render(const std::string& var) const {
  if (is_polynomial()) return num_.render(var);
  auto wrap = [&](const QPolynomial& p) {
    long terms = std::count_if(p.coeffs().begin(), p.coeffs().end(), [](const mpq_class& c) { return sgn(c) != 0; });
    bool simple = p.degree() <= 0 || (terms == 1 && p.leading() == 1);
    std::string s = p.render(var);
    return simple ? s : "(" + s + ")";
  };
  return wrap(num_) + "/" + wrap(den_);
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw DivisionByZero(a.render() + " / 0");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction out = *this;
  out.num_ = -out.num_;
  return out;
}

RationalFunction pow(const RationalFunction& r, int k) {
  if (k >= 0) return RationalFunction(pow(r.num(), k), pow(r.den(), k));
  if (r.is_zero()) throw DivisionByZero("0^" + std::to_string(k));
  return RationalFunction(pow(r.den(), -k), pow(r.num(), -k));
}

IntegerRational::IntegerRational(const RationalFunction& r) {
  mpz_class l = r.num().denominator_lcm();
  mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), r.den().denominator_lcm().get_mpz_t());
  for (const auto& c : r.num().coeffs()) num_.push_back(mpz_class(c * l));
  for (const auto& c : r.den().coeffs()) den_.push_back(mpz_class(c * l));
}

void IntegerRational::eval(long n, mpz_class& num, mpz_class& den) const {
  num = 0;
  for (auto it = num_.rbegin(); it != num_.rend(); ++it) num = num * n + *it;
  den = 0;
  for (auto it = den_.rbegin(); it != den_.rend(); ++it) den = den * n + *it;
  if (sgn(den) < 0) {
    num = -num;
    den = -den;
  }
}

mpq_class IntegerRational::eval(long n) const {
  mpz_class num;
  mpz_class den;
  eval(n, num, den);
  if (sgn(den) == 0) throw DivisionByZero("pole at n = " + std::to_string(n));
  mpq_class out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace cfforge
