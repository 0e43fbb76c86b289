#include "cfforge/telescope.hpp"

#include "cfforge/errors.hpp"
#include "cfforge/mpval.hpp"

#include <algorithm>
#include <tuple>

namespace cfforge {

// ------------------------------------------------------------------ factoring

Factorization factor_shifts(const QPolynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("factor_shifts of the zero polynomial");
  Factorization out{p.leading(), {}, QPolynomial::constant(1)};
  for (const auto& [factor, mult] : square_free(p)) {
    QPolynomial rest = factor;
    for (const auto& r : rational_roots(factor)) {
      out.factors.push_back({-r, mult});
      rest = divmod(rest, QPolynomial::linear(-r)).first;
    }
    if (rest.degree() > 0) out.remainder *= pow(rest, mult);
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const LinearFactor& x, const LinearFactor& y) { return x.shift < y.shift; });
  return out;
}

std::vector<PFTerm> partial_fractions(const QPolynomial& num, const std::vector<LinearFactor>& factors) {
  int total = 0;
  for (const auto& f : factors) total += f.multiplicity;
  if (num.degree() >= total) {
    throw DegreeTooHigh("numerator degree " + std::to_string(num.degree()) + " >= denominator degree " +
                        std::to_string(total));
  }
  std::vector<PFTerm> out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const mpq_class& a = factors[i].shift;
    int m = factors[i].multiplicity;
    // t = n + a: expand num(t - a) / prod_{j != i} (t - a + a_j)^m_j to order t^(m-1)
    QPolynomial top = num.shifted(-a);
    QPolynomial rest = QPolynomial::constant(1);
    for (std::size_t j = 0; j < factors.size(); ++j) {
      if (j == i) continue;
      rest *= pow(QPolynomial::linear(factors[j].shift - a), factors[j].multiplicity);
    }
    std::vector<mpq_class> r(static_cast<std::size_t>(m));
    mpq_class d0 = rest.coeff(0);
    for (int k = 0; k < m; ++k) {
      mpq_class acc = top.coeff(k);
      for (int l = 1; l <= k; ++l) acc -= rest.coeff(l) * r[static_cast<std::size_t>(k - l)];
      r[static_cast<std::size_t>(k)] = acc / d0;
    }
    for (int k = 0; k < m; ++k) {
      if (sgn(r[static_cast<std::size_t>(k)]) != 0) out.push_back({r[static_cast<std::size_t>(k)], a, m - k});
    }
  }
  return out;
}

// ------------------------------------------------------------------ atoms

Atom Atom::zeta(long k) {
  if (k < 2) throw DomainError("Zeta atom needs k >= 2");
  Atom x;
  x.kind = Kind::Zeta;
  x.k = k;
  return x;
}

Atom Atom::log_prime(long p) {
  Atom x;
  x.kind = Kind::LogPrime;
  x.k = p;
  return x;
}

Atom Atom::euler_gamma() {
  Atom x;
  x.kind = Kind::EulerGamma;
  return x;
}

Atom Atom::catalan() {
  Atom x;
  x.kind = Kind::Catalan;
  return x;
}

Atom Atom::pi() {
  Atom x;
  x.kind = Kind::Pi;
  return x;
}

Atom Atom::digamma(const mpq_class& a) {
  Atom x;
  x.kind = Kind::Digamma;
  x.a = a;
  return x;
}

Atom Atom::hurwitz(long k, const mpq_class& a) {
  Atom x;
  x.kind = Kind::Hurwitz;
  x.k = k;
  x.a = a;
  return x;
}

Atom Atom::custom(const Expr& e) {
  Atom x;
  x.kind = Kind::Custom;
  x.expr = e;
  x.label = render(e);
  return x;
}

std::string Atom::name() const {
  switch (kind) {
    case Kind::One: return "1";
    case Kind::Zeta: return "zeta(" + std::to_string(k) + ")";
    case Kind::LogPrime: return "log(" + std::to_string(k) + ")";
    case Kind::EulerGamma: return "gamma";
    case Kind::Catalan: return "catalan";
    case Kind::Pi: return "pi";
    case Kind::Digamma: return "psi(" + a.get_str() + ")";
    case Kind::Hurwitz: return "hurwitz_zeta(" + std::to_string(k) + "," + a.get_str() + ")";
    case Kind::Custom: return label;
  }
  return "?";
}

BigFloat Atom::eval(Bits bits) const {
  switch (kind) {
    case Kind::One: return BigFloat(1, bits);
    case Kind::Zeta: return mpval::zeta_int(static_cast<int>(k), bits);
    case Kind::LogPrime: return mpval::log_rational(k, bits);
    case Kind::EulerGamma: return mpval::const_gamma(bits);
    case Kind::Catalan: return mpval::const_catalan(bits);
    case Kind::Pi: return mpval::const_pi(bits);
    case Kind::Digamma: return mpval::digamma(a, bits);
    case Kind::Hurwitz: return mpval::hurwitz_zeta(static_cast<int>(k), a, bits);
    case Kind::Custom: return eval_float(expr, bits);
  }
  return BigFloat(bits);
}

bool operator<(const Atom& x, const Atom& y) {
  if (x.kind != y.kind) return x.kind < y.kind;
  if (x.k != y.k) return x.k < y.k;
  if (x.a != y.a) return x.a < y.a;
  return x.label < y.label;
}

bool operator==(const Atom& x, const Atom& y) {
  return x.kind == y.kind && x.k == y.k && x.a == y.a && x.label == y.label;
}

// ------------------------------------------------------------------ ClosedForm

void ClosedForm::add(const Atom& atom, const mpq_class& coeff) {
  if (sgn(coeff) == 0) return;
  auto [it, inserted] = terms_.emplace(atom, coeff);
  if (!inserted) {
    it->second += coeff;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

void ClosedForm::add_log(const mpq_class& r, const mpq_class& coeff) {
  if (sgn(r) <= 0) throw DomainError("NonPositive: log of " + r.get_str());
  auto add_factors = [&](mpz_class n, const mpq_class& sign) {
    for (unsigned long p = 2; n > 1; ++p) {
      if (mpz_class(p) * p > n) {
        if (!n.fits_slong_p()) throw Unsupported("prime factor too large for a LogPrime atom");
        add(Atom::log_prime(n.get_si()), sign * coeff);
        break;
      }
      while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
        n /= p;
        add(Atom::log_prime(static_cast<long>(p)), sign * coeff);
      }
    }
  };
  add_factors(r.get_num(), 1);
  add_factors(r.get_den(), -1);
}

mpq_class ClosedForm::coeff(const Atom& atom) const {
  auto it = terms_.find(atom);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

ClosedForm& ClosedForm::operator+=(const ClosedForm& other) {
  for (const auto& [atom, c] : other.terms_) add(atom, c);
  return *this;
}

ClosedForm ClosedForm::operator*(const mpq_class& c) const {
  ClosedForm out;
  for (const auto& [atom, v] : terms_) out.add(atom, v * c);
  return out;
}

BigFloat eval_closed_form(const ClosedForm& cf, Bits bits) {
  // coefficients can be large and cancel; widen by their size
  long extra = 16;
  for (const auto& [atom, c] : cf.terms()) {
    extra = std::max<long>(extra, static_cast<long>(mpz_sizeinbase(c.get_num_mpz_t(), 2)) + 16);
  }
  Bits w = bits + mpval::kGuardBits + extra;
  BigFloat sum(w);
  for (const auto& [atom, c] : cf.terms()) sum += atom.eval(w) * BigFloat(c, w);
  return sum.rounded(bits);
}

std::string render_closed_form(const ClosedForm& cf, ClosedForm::Style style) {
  std::vector<std::pair<std::string, mpq_class>> items;  // name ("" for One), coefficient
  for (const auto& [atom, c] : cf.terms()) {
    if (atom.kind == Atom::Kind::One) {
      items.emplace_back("", c);
    } else if (style == ClosedForm::Style::Pi && atom.kind == Atom::Kind::Zeta && atom.k % 2 == 0) {
      // zeta(2m) = (-1)^(m+1) B_2m (2 pi)^2m / (2 (2m)!)
      int k = static_cast<int>(atom.k);
      mpz_class fact;
      mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k));
      mpz_class two_k;
      mpz_ui_pow_ui(two_k.get_mpz_t(), 2, static_cast<unsigned long>(k));
      mpq_class r = mpval::bernoulli(k) * mpq_class(two_k) / (2 * mpq_class(fact));
      if ((k / 2) % 2 == 0) r = -r;
      items.emplace_back("pi^" + std::to_string(k), c * r);
    } else {
      items.emplace_back(atom.name(), c);
    }
  }
  std::string out;
  for (const auto& [name, c] : items) {
    bool negative = sgn(c) < 0;
    mpq_class a = abs(c);
    std::string body;
    if (name.empty()) {
      body = a.get_str();
    } else if (a == 1) {
      body = name;
    } else {
      body = a.get_str() + "*" + name;
    }
    if (out.empty()) {
      out = negative ? "-" + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

// ------------------------------------------------------------------ summation

namespace {

mpq_class inverse_power(const mpq_class& x, int m) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(m));
  mpz_pow_ui(den.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(m));
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

mpz_class floor_of(const mpq_class& x) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f;
}

/// Terms with every shift > 0.
ClosedForm sum_positive(const std::vector<PFTerm>& terms) {
  ClosedForm out;
  for (const auto& t : terms) {
    const mpq_class& c = t.coeff;
    const mpq_class& a = t.shift;
    int m = t.power;
    mpz_class whole = floor_of(a);
    mpq_class frac = a - mpq_class(whole);
    long K = whole.get_si();
    if (m >= 2) {
      if (frac == 0) {
        // sum_{n>=0} (n+a)^-m = zeta(m) - sum_{j=1}^{a-1} j^-m
        out.add(Atom::zeta(m), c);
        mpq_class fin = 0;
        for (long j = 1; j < K; ++j) fin += inverse_power(mpq_class(j), m);
        out.add(Atom::one(), -c * fin);
      } else if (frac == mpq_class(1, 2)) {
        // zeta(m, 1/2) = (2^m - 1) zeta(m)
        mpz_class two_m;
        mpz_ui_pow_ui(two_m.get_mpz_t(), 2, static_cast<unsigned long>(m));
        out.add(Atom::zeta(m), c * mpq_class(two_m - 1));
        mpq_class fin = 0;
        for (long j = 0; j < K; ++j) fin += inverse_power(j + frac, m);
        out.add(Atom::one(), -c * fin);
      } else {
        out.add(Atom::hurwitz(m, frac), c);
        mpq_class fin = 0;
        for (long j = 0; j < K; ++j) fin += inverse_power(j + frac, m);
        out.add(Atom::one(), -c * fin);
      }
    } else {
      // sum_n c / (n + a) contributes -c psi(a) once the coefficients cancel
      if (frac == 0) {
        // psi(k) = -gamma + H_{k-1}
        out.add(Atom::euler_gamma(), c);
        mpq_class h = 0;
        for (long j = 1; j < K; ++j) h += mpq_class(1, j);
        out.add(Atom::one(), -c * h);
      } else if (frac == mpq_class(1, 2)) {
        // psi(b + 1/2) = -gamma - 2 log 2 + sum_{j<b} 1/(j + 1/2)
        out.add(Atom::euler_gamma(), c);
        out.add(Atom::log_prime(2), 2 * c);
        mpq_class h = 0;
        for (long j = 0; j < K; ++j) h += 1 / (j + frac);
        out.add(Atom::one(), -c * h);
      } else {
        out.add(Atom::digamma(frac), -c);
        mpq_class h = 0;
        for (long j = 0; j < K; ++j) h += 1 / (j + frac);
        out.add(Atom::one(), -c * h);
      }
    }
  }
  return out;
}

}  // namespace

ClosedForm sum_closed_form(const std::vector<PFTerm>& terms) {
  mpq_class simple = 0;
  for (const auto& t : terms) {
    if (t.power < 1) throw std::invalid_argument("partial fraction power must be >= 1");
    if (t.power == 1) simple += t.coeff;
  }
  if (sgn(simple) != 0) {
    throw NonConvergent("simple-pole coefficients sum to " + simple.get_str() + ", the series diverges");
  }
  // peel initial terms until every shift is positive
  long peel = 0;
  for (const auto& t : terms) {
    if (t.shift.get_den() == 1 && sgn(t.shift) <= 0) {
      throw PoleAtIndex(-t.shift.get_num().get_si(), "term 1/(n" + (sgn(t.shift) == 0 ? "" : t.shift.get_str()) + ")");
    }
    if (sgn(t.shift) <= 0) peel = std::max(peel, floor_of(-t.shift).get_si() + 1);
  }
  ClosedForm out;
  std::vector<PFTerm> shifted = terms;
  if (peel > 0) {
    mpq_class fin = 0;
    for (long n = 0; n < peel; ++n) {
      for (const auto& t : terms) fin += t.coeff * inverse_power(n + t.shift, t.power);
    }
    out.add(Atom::one(), fin);
    for (auto& t : shifted) t.shift += peel;
  }
  out += sum_positive(shifted);
  return out;
}

RationalFunction series_term(const CFSpec& spec) {
  if (!spec.exact()) throw Unsupported("f and g must be rational functions: " + spec.describe());
  const RationalFunction& f = *spec.f_rational();
  const RationalFunction& g = *spec.g_rational();
  mpq_class g0 = spec.g_at(0);
  return RationalFunction(QPolynomial::constant(g0 * g0)) / (f.shifted(1) * g * g.shifted(1));
}

ClosedForm closed_form_for(const CFSpec& spec) {
  RationalFunction t = series_term(spec);
  Factorization fac = factor_shifts(t.den());
  if (!fac.complete()) {
    throw Unsupported("denominator factor " + fac.remainder.render() + " does not split over Q");
  }
  QPolynomial num = t.num() * (1 / fac.unit);
  if (num.degree() >= t.den().degree() - 1) {
    throw NonConvergent("series terms decay too slowly for " + spec.describe());
  }
  return sum_closed_form(partial_fractions(num, fac.factors));
}

}  // namespace cfforge
