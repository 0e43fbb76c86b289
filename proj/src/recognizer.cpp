#include "cfforge/recognizer.hpp"

#include "cfforge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cfforge {

bool ConstantBasis::contains(const std::string& label) const {
  return std::any_of(entries.begin(), entries.end(), [&](const BasisEntry& e) { return e.label == label; });
}

void ConstantBasis::add(const Atom& atom) {
  std::string label = atom.name();
  if (contains(label)) return;
  Expr e;
  switch (atom.kind) {
    case Atom::Kind::Digamma:
    case Atom::Kind::Hurwitz: break;
    case Atom::Kind::Custom: e = atom.expr; break;
    default: e = parse(label);
  }
  entries.push_back({label, e, atom});
}

ConstantBasis default_basis(int level) {
  if (level < 1 || level > 3) throw std::invalid_argument("basis level must be 1, 2 or 3");
  ConstantBasis b;
  b.level = level;
  b.add(Atom::one());
  for (long k = 2; k <= 8; ++k) b.add(Atom::zeta(k));
  if (level >= 2) {
    b.add(Atom::euler_gamma());
    b.add(Atom::log_prime(2));
    b.add(Atom::log_prime(3));
    b.add(Atom::catalan());
    b.add(Atom::pi());
  }
  if (level >= 3) {
    for (const char* text : {"pi*sqrt(3)", "pi*sqrt(2)", "pi*log(2)", "pi^2*log(2)", "log(2)^2"}) {
      b.add(Atom::custom(parse(text)));
    }
  }
  return b;
}

ConstantBasis basis_for(const ClosedForm& cf) {
  ConstantBasis b;
  b.add(Atom::one());
  for (const auto& [atom, c] : cf.terms()) b.add(atom);
  return b;
}

namespace {

BigFloat dot(const std::vector<mpz_class>& m, const std::vector<BigFloat>& v, Bits bits) {
  BigFloat s(bits);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (sgn(m[i]) != 0) s += BigFloat(m[i], bits) * v[i];
  }
  return s;
}

void canonicalize(std::vector<mpz_class>& m) {
  mpz_class g = 0;
  for (const auto& c : m) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g == 0) return;
  auto first = std::find_if(m.begin(), m.end(), [](const mpz_class& c) { return sgn(c) != 0; });
  if (sgn(*first) < 0) g = -g;
  for (auto& c : m) c /= g;
}

long coefficient_mass(const std::vector<mpz_class>& m) {
  double mass = 0;
  for (const auto& c : m) {
    if (sgn(c) != 0) mass += std::log2(std::abs(mpz_get_d(c.get_mpz_t())));
  }
  return static_cast<long>(std::ceil(mass));
}

std::size_t max_bits(const std::vector<mpz_class>& m) {
  std::size_t b = 0;
  for (const auto& c : m) {
    if (sgn(c) != 0) b = std::max(b, mpz_sizeinbase(c.get_mpz_t(), 2));
  }
  return b;
}

}  // namespace

std::optional<Relation> pslq(const std::vector<BigFloat>& values, Bits precision_bits, int max_coeff_bits) {
  if (precision_bits < 128) throw PrecisionTooLow("pslq needs at least 128 bits, got " + std::to_string(precision_bits));
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("pslq needs at least two values");
  const Bits W = precision_bits;

  BigFloat scale(W);
  for (const auto& v : values) {
    if (abs(v) > scale) scale = abs(v);
  }
  BigFloat accept = BigFloat::pow2(-static_cast<long>(precision_bits) / 2, W) * (scale > BigFloat(1, W) ? scale : BigFloat(1, W));

  auto try_relation = [&](std::vector<mpz_class> m) -> std::optional<Relation> {
    if (std::all_of(m.begin(), m.end(), [](const mpz_class& c) { return sgn(c) == 0; })) return std::nullopt;
    canonicalize(m);
    if (max_bits(m) > static_cast<std::size_t>(max_coeff_bits)) return std::nullopt;
    BigFloat r = abs(dot(m, values, W));
    if (!(r < accept)) return std::nullopt;
    double lr = r.is_zero() ? static_cast<double>(W) : std::min(-r.log2_abs(), static_cast<double>(W));
    return Relation{m, r, static_cast<long>(std::floor(lr)) - coefficient_mass(m)};
  };

  // an exactly vanishing value is a relation on its own
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i].is_zero()) {
      std::vector<mpz_class> m(n);
      m[i] = 1;
      return try_relation(m);
    }
  }

  const BigFloat gamma = sqrt(BigFloat(mpq_class(4, 3), W));
  std::vector<BigFloat> x;
  for (const auto& v : values) x.push_back(v.rounded(W));

  // s_k = sqrt(sum_{j >= k} x_j^2), normalized so s_0 = 1
  std::vector<BigFloat> s(n, BigFloat(W));
  BigFloat acc(W);
  for (std::size_t k = n; k-- > 0;) {
    acc += x[k] * x[k];
    s[k] = sqrt(acc);
  }
  BigFloat s0 = s[0];
  std::vector<BigFloat> y(n, BigFloat(W));
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = x[k] / s0;
    s[k] = s[k] / s0;
  }

  std::vector<std::vector<BigFloat>> H(n, std::vector<BigFloat>(n - 1, BigFloat(W)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n - 1 && j <= i; ++j) {
      if (i == j) {
        H[i][j] = s[j + 1] / s[j];
      } else {
        H[i][j] = -(y[i] * y[j]) / (s[j] * s[j + 1]);
      }
    }
  }
  std::vector<std::vector<mpz_class>> A(n, std::vector<mpz_class>(n));
  std::vector<std::vector<mpz_class>> B(n, std::vector<mpz_class>(n));
  for (std::size_t i = 0; i < n; ++i) A[i][i] = B[i][i] = 1;

  auto reduce = [&](std::size_t i, std::size_t j) {
    if (H[j][j].is_zero()) return;
    mpz_class t = (H[i][j] / H[j][j]).round_to_integer();
    if (t == 0) return;
    BigFloat tf(t, W);
    y[j] += tf * y[i];
    for (std::size_t k = 0; k <= j; ++k) H[i][k] -= tf * H[j][k];
    for (std::size_t k = 0; k < n; ++k) {
      A[i][k] -= t * A[j][k];
      B[k][j] += t * B[k][i];
    }
  };

  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = std::min(i - 1, n - 2) + 1; j-- > 0;) reduce(i, j);
  }

  const BigFloat detect = BigFloat::pow2(-static_cast<long>(0.8 * static_cast<double>(precision_bits)), W);
  const BigFloat bound_limit = BigFloat::pow2(max_coeff_bits, W);
  const long max_iter = 200L * static_cast<long>(n * n) * std::max(1, max_coeff_bits / 8) + 1000;

  for (long iter = 0; iter < max_iter; ++iter) {
    // pick m maximizing gamma^(i+1) |H_ii|
    std::size_t m = 0;
    BigFloat best(W);
    BigFloat gp = gamma;
    for (std::size_t i = 0; i < n - 1; ++i) {
      BigFloat v = gp * abs(H[i][i]);
      if (i == 0 || v > best) {
        best = v;
        m = i;
      }
      gp *= gamma;
    }
    std::swap(y[m], y[m + 1]);
    std::swap(A[m], A[m + 1]);
    for (std::size_t k = 0; k < n; ++k) std::swap(B[k][m], B[k][m + 1]);
    std::swap(H[m], H[m + 1]);
    if (m < n - 2) {
      BigFloat t0 = sqrt(H[m][m] * H[m][m] + H[m][m + 1] * H[m][m + 1]);
      if (!t0.is_zero()) {
        BigFloat t1 = H[m][m] / t0;
        BigFloat t2 = H[m][m + 1] / t0;
        for (std::size_t i = m; i < n; ++i) {
          BigFloat t3 = H[i][m];
          BigFloat t4 = H[i][m + 1];
          H[i][m] = t1 * t3 + t2 * t4;
          H[i][m + 1] = t1 * t4 - t2 * t3;
        }
      }
    }
    for (std::size_t i = m + 1; i < n; ++i) {
      for (std::size_t j = std::min(i - 1, m + 1) + 1; j-- > 0;) reduce(i, j);
    }

    // smallest y_j marks a relation in column j of B
    std::size_t jmin = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (abs(y[j]) < abs(y[jmin])) jmin = j;
    }
    if (y[jmin].is_zero() || abs(y[jmin]) < detect) {
      std::vector<std::optional<Relation>> found;
      for (std::size_t j = 0; j < n; ++j) {
        if (!(abs(y[j]) < detect) && !y[j].is_zero()) continue;
        std::vector<mpz_class> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = B[k][j];
        if (auto r = try_relation(col)) found.push_back(r);
      }
      if (found.empty()) return std::nullopt;
      // smallest coefficient norm wins
      auto norm2 = [](const Relation& r) {
        mpz_class s2 = 0;
        for (const auto& c : r.coefficients) s2 += c * c;
        return s2;
      };
      auto it = std::min_element(found.begin(), found.end(),
                                 [&](const auto& a, const auto& b) { return norm2(*a) < norm2(*b); });
      return *it;
    }

    // any relation has norm >= 1 / max |H_jj|
    BigFloat hmax(W);
    for (std::size_t j = 0; j < n - 1; ++j) {
      if (abs(H[j][j]) > hmax) hmax = abs(H[j][j]);
    }
    if (hmax.is_zero()) return std::nullopt;
    if (BigFloat(1, W) / hmax > bound_limit) return std::nullopt;

    // precision exhausted once the multipliers eat most of the mantissa
    std::size_t bbits = 0;
    for (const auto& row : B) bbits = std::max(bbits, max_bits(row));
    if (bbits > static_cast<std::size_t>(W) * 9 / 10) return std::nullopt;
  }
  return std::nullopt;
}

std::optional<ClosedForm> recognize(const ValueSource& source, const ConstantBasis& basis, Bits precision_bits,
                                    int max_coeff_bits) {
  if (precision_bits < 128) {
    throw PrecisionTooLow("recognize needs at least 128 bits, got " + std::to_string(precision_bits));
  }
  if (basis.entries.empty()) throw std::invalid_argument("empty basis");
  BigFloat x = source(precision_bits);
  if (x.is_zero()) return ClosedForm{};

  auto values_at = [&](const BigFloat& v, Bits bits) {
    std::vector<BigFloat> vals{v};
    for (const auto& e : basis.entries) vals.push_back(e.atom.eval(bits));
    return vals;
  };
  std::vector<BigFloat> vals = values_at(x, precision_bits);
  auto rel = pslq(vals, precision_bits, max_coeff_bits);
  if (!rel) return std::nullopt;
  const auto& m = rel->coefficients;
  if (sgn(m[0]) == 0) return std::nullopt;

  ClosedForm cf;
  for (std::size_t i = 1; i < m.size(); ++i) cf.add(basis.entries[i - 1].atom, -mpq_class(m[i]) / mpq_class(m[0]));

  // soundness gate: the residual must shrink with 64 more bits
  Bits hi = precision_bits + 64;
  std::vector<BigFloat> vals_hi = values_at(source(hi), hi);
  BigFloat r2 = abs(dot(m, vals_hi, hi));
  BigFloat norm(hi);
  for (std::size_t i = 0; i < m.size(); ++i) {
    BigFloat v = abs(vals_hi[i]);
    if (v < BigFloat(1, hi)) v = BigFloat(1, hi);
    norm += abs(BigFloat(m[i], hi)) * v;
  }
  BigFloat floor = BigFloat::pow2(-static_cast<long>(precision_bits), hi) * norm;
  BigFloat bound = BigFloat::pow2(-32, hi) * (rel->residual > floor ? rel->residual : floor);
  if (!(r2 < bound)) return std::nullopt;
  return cf;
}

std::optional<ClosedForm> recognize(const BigFloat& x, const ConstantBasis& basis, Bits precision_bits,
                                    int max_coeff_bits) {
  return recognize([x](Bits) { return x; }, basis, precision_bits, max_coeff_bits);
}

}  // namespace cfforge
