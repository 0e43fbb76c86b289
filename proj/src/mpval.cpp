#include "cfforge/mpval.hpp"

#include "cfforge/errors.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace cfforge::mpval {

namespace {

class ConstantCache {
 public:
  BigFloat get(const std::string& name, Bits bits, const std::function<BigFloat(Bits)>& compute) {
    Key key{name, bits};
    {
      std::shared_lock lock(mutex_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    BigFloat value = compute(bits);
    std::unique_lock lock(mutex_);
    return values_.emplace(std::move(key), std::move(value)).first->second;
  }

 private:
  using Key = std::pair<std::string, Bits>;
  std::shared_mutex mutex_;
  std::map<Key, BigFloat> values_;
};

ConstantCache& cache() {
  static ConstantCache instance;
  return instance;
}

Bits working(Bits bits) { return bits + kGuardBits; }

BigFloat log_of_integer(const mpz_class& n, Bits bits) {
  Bits exact = std::max<Bits>(bits, static_cast<Bits>(mpz_sizeinbase(n.get_mpz_t(), 2)) + 2);
  BigFloat x(n, exact);
  BigFloat out(bits);
  mpfr_log(out.get(), x.get(), MPFR_RNDN);
  return out;
}

// Cohen-Villegas-Zagier acceleration of sum_{k>=0} (-1)^k a_k for totally
// monotone a_k; error about 5.8^-n relative to the first term.
BigFloat alternating_sum(Bits bits, const std::function<BigFloat(long, Bits)>& term) {
  Bits w = bits + 16;
  long n = static_cast<long>(std::ceil(static_cast<double>(bits) * 0.39321)) + 4;
  BigFloat root(8, w);
  root = sqrt(root) + 3;
  BigFloat d = pow(root, n);
  d = (d + BigFloat(1, w) / d) / 2;
  BigFloat b(-1, w);
  BigFloat c = -d;
  BigFloat s(w);
  for (long k = 0; k < n; ++k) {
    c = b - c;
    s += c * term(k, w);
    b *= 2 * (k + n);
    b *= (k - n);
    b /= (2 * k + 1);
    b /= (k + 1);
  }
  return s / d;
}

BigFloat arctan_inverse(long x, Bits w) {
  BigFloat power = BigFloat(1, w) / x;
  long x2 = x * x;
  BigFloat sum(w);
  BigFloat threshold = BigFloat::pow2(-w - 2, w);
  for (long k = 0;; ++k) {
    BigFloat t = power / (2 * k + 1);
    if (k % 2 == 0) sum += t; else sum -= t;
    power /= x2;
    if (abs(power) < threshold) break;
  }
  return sum;
}

std::mutex bernoulli_mutex;
std::vector<mpq_class> bernoulli_table{mpq_class(1)};

}  // namespace

BigFloat pi_agm(Bits bits) {
  Bits w = working(bits);
  BigFloat a(1, w);
  BigFloat b = BigFloat(1, w) / sqrt(BigFloat(2, w));
  BigFloat t = BigFloat(1, w) / 4;
  BigFloat p(1, w);
  BigFloat threshold = BigFloat::pow2(-w, w);
  while (abs(a - b) > threshold) {
    BigFloat next = (a + b) / 2;
    b = sqrt(a * b);
    BigFloat diff = a - next;
    t -= p * diff * diff;
    p *= 2;
    a = std::move(next);
  }
  BigFloat s = a + b;
  return (s * s / (t * 4)).rounded(bits);
}

BigFloat const_pi(Bits bits) { return cache().get("pi", bits, pi_agm); }

BigFloat gamma_brent_mcmillan(Bits bits) {
  Bits w = working(bits) + 16;
  // error ~ pi * exp(-4n)
  long n = static_cast<long>(std::ceil(static_cast<double>(w) * std::log(2.0) / 4.0)) + 2;
  BigFloat n2(n * n, w);
  BigFloat a = -log_of_integer(mpz_class(n), w);
  BigFloat b(1, w);
  BigFloat u = a;
  BigFloat v = b;
  for (long k = 1;; ++k) {
    b = b * n2 / k / k;
    a = (a * n2 / k + b) / k;
    u += a;
    v += b;
    if (k > n && abs(a).log2_abs() < v.log2_abs() - w && b.log2_abs() < v.log2_abs() - w) break;
  }
  return (u / v).rounded(bits);
}

BigFloat const_gamma(Bits bits) { return cache().get("gamma", bits, gamma_brent_mcmillan); }

BigFloat catalan_ramanujan(Bits bits) {
  // G = pi/8 log(2+sqrt 3) + 3/8 sum_{n>=0} (n!)^2 / ((2n)! (2n+1)^2)
  Bits w = working(bits);
  BigFloat ratio(1, w);  // (n!)^2 / (2n)!
  BigFloat sum(w);
  BigFloat threshold = BigFloat::pow2(-w - 4, w);
  for (long n = 0;; ++n) {
    BigFloat t = ratio / ((2 * n + 1) * (2 * n + 1));
    sum += t;
    if (t < threshold) break;
    ratio = ratio * (n + 1) / (2 * (2 * n + 1));
  }
  BigFloat s3 = sqrt(BigFloat(3, w)) + 2;
  BigFloat lg(w);
  mpfr_log(lg.get(), s3.get(), MPFR_RNDN);
  BigFloat g = const_pi(w) * lg / 8 + sum * 3 / 8;
  return g.rounded(bits);
}

BigFloat const_catalan(Bits bits) { return cache().get("catalan", bits, catalan_ramanujan); }

BigFloat const_e(Bits bits) {
  return cache().get("e", bits, [](Bits b) {
    BigFloat one(1, b);
    BigFloat out(b);
    mpfr_exp(out.get(), one.get(), MPFR_RNDN);
    return out;
  });
}

mpq_class bernoulli(int n) {
  if (n < 0) throw std::invalid_argument("bernoulli: negative index");
  if (n == 1) return mpq_class(-1, 2);
  if (n % 2 == 1) return mpq_class(0);
  std::lock_guard lock(bernoulli_mutex);
  if (static_cast<int>(bernoulli_table.size()) <= n) {
    // Akiyama-Tanigawa; recompute the table up to n (B_1 = +1/2 in this form).
    std::vector<mpq_class> row(static_cast<std::size_t>(n) + 1);
    std::vector<mpq_class> table(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) {
      row[static_cast<std::size_t>(m)] = mpq_class(1, m + 1);
      for (int j = m; j >= 1; --j) {
        auto jj = static_cast<std::size_t>(j);
        row[jj - 1] = j * (row[jj - 1] - row[jj]);
        row[jj - 1].canonicalize();
      }
      table[static_cast<std::size_t>(m)] = row[0];
    }
    bernoulli_table = std::move(table);
  }
  return bernoulli_table[static_cast<std::size_t>(n)];
}

BigFloat zeta_int(int k, Bits bits) {
  if (k < 2) throw DomainError("zeta_int requires k >= 2, got " + std::to_string(k));
  return cache().get("zeta" + std::to_string(k), bits, [k](Bits b) {
    Bits w = working(b);
    if (k % 2 == 0) {
      // zeta(2m) = (-1)^(m+1) B_2m (2 pi)^2m / (2 (2m)!)
      mpz_class fact;
      mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k));
      mpq_class coeff = bernoulli(k) / (2 * mpq_class(fact));
      if ((k / 2) % 2 == 0) coeff = -coeff;
      BigFloat two_pi = const_pi(w + 8) * 2;
      return (BigFloat(coeff, w) * pow(two_pi, k)).rounded(b);
    }
    return alt::zeta_alternating(k, b);
  });
}

const char* fn_name(Fn fn) {
  switch (fn) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
    case Fn::Tanh: return "tanh";
    case Fn::Coth: return "coth";
    case Fn::Tan: return "tan";
    case Fn::Cot: return "cot";
    case Fn::Atanh: return "atanh";
  }
  return "?";
}

BigFloat elem(Fn fn, const BigFloat& x) {
  BigFloat out(x.precision());
  auto domain = [&](const char* why) {
    return DomainError(std::string(fn_name(fn)) + ": " + why + " (x = " + x.to_string(20) + ")");
  };
  switch (fn) {
    case Fn::Exp: mpfr_exp(out.get(), x.get(), MPFR_RNDN); break;
    case Fn::Log:
      if (x.sign() <= 0) throw domain("argument must be positive");
      mpfr_log(out.get(), x.get(), MPFR_RNDN);
      break;
    case Fn::Sqrt:
      if (x.sign() < 0) throw domain("argument must be non-negative");
      mpfr_sqrt(out.get(), x.get(), MPFR_RNDN);
      break;
    case Fn::Tanh: mpfr_tanh(out.get(), x.get(), MPFR_RNDN); break;
    case Fn::Coth:
      if (x.is_zero()) throw domain("pole at 0");
      mpfr_coth(out.get(), x.get(), MPFR_RNDN);
      break;
    case Fn::Tan: mpfr_tan(out.get(), x.get(), MPFR_RNDN); break;
    case Fn::Cot:
      if (x.is_zero()) throw domain("pole at 0");
      mpfr_cot(out.get(), x.get(), MPFR_RNDN);
      break;
    case Fn::Atanh:
      if (mpfr_cmpabs_ui(x.get(), 1) >= 0) throw domain("|x| must be < 1");
      mpfr_atanh(out.get(), x.get(), MPFR_RNDN);
      break;
  }
  if (!out.is_finite()) throw domain("non-finite result");
  return out;
}

BigFloat log_rational(const mpq_class& r, Bits bits) {
  if (sgn(r) <= 0) throw DomainError("NonPositive: log_rational of " + r.get_str());
  Bits w = working(bits);
  BigFloat out = log_of_integer(r.get_num(), w) - log_of_integer(r.get_den(), w);
  return out.rounded(bits);
}

BigFloat hurwitz_zeta(int k, const mpq_class& a, Bits bits) {
  if (k < 2) throw DomainError("hurwitz_zeta requires k >= 2");
  if (sgn(a) <= 0) throw DomainError("hurwitz_zeta requires a > 0");
  Bits w = working(bits) + 8;
  long n = static_cast<long>(w / 2) + 10;
  BigFloat av(a, w);
  BigFloat sum(w);
  for (long j = 0; j < n; ++j) sum += pow(av + j, -k);
  BigFloat x = av + n;
  sum += pow(x, 1 - k) / (k - 1);
  sum += pow(x, -k) / 2;
  // B_2i / (2i)! * k (k+1) ... (k+2i-2) * x^(-k-2i+1)
  BigFloat rising(k, w);  // k (k+1) ... (k+2i-2), starts at i=1
  BigFloat xpow = pow(x, -k - 1);
  BigFloat inv_x2 = BigFloat(1, w) / (x * x);
  mpz_class fact(2);
  BigFloat threshold = BigFloat::pow2(-w, w);
  for (int i = 1; i < 400; ++i) {
    BigFloat t = BigFloat(bernoulli(2 * i) / mpq_class(fact), w) * rising * xpow;
    sum += t;
    if (abs(t) < threshold) break;
    rising *= (k + 2 * i - 1);
    rising *= (k + 2 * i);
    xpow *= inv_x2;
    fact *= (2 * i + 1) * (2 * i + 2);
  }
  return sum.rounded(bits);
}

BigFloat digamma(const mpq_class& a, Bits bits) {
  Bits w = working(bits) + 8;
  if (a.get_den() == 1 && sgn(a) <= 0) throw DomainError("digamma pole at " + a.get_str());
  // a = frac + shift with frac in (0, 1]
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  mpq_class frac = a - mpq_class(fl);
  if (frac == 0) {
    frac = 1;
    fl -= 1;
  }
  BigFloat base(w);
  if (frac == 1) {
    base = -const_gamma(w);
  } else {
    // Gauss: psi(p/q) = -gamma - log(2q) - pi/2 cot(pi p/q)
    //                   + 2 sum_{k=1}^{floor((q-1)/2)} cos(2 pi k p/q) log sin(pi k/q)
    long p = frac.get_num().get_si();
    long q = frac.get_den().get_si();
    BigFloat pi = const_pi(w);
    base = -const_gamma(w) - log_of_integer(mpz_class(2 * q), w);
    BigFloat arg = pi * p / q;
    base -= pi / 2 * elem(Fn::Cot, arg);
    for (long k = 1; k <= (q - 1) / 2; ++k) {
      BigFloat c(w);
      BigFloat s(w);
      BigFloat t1 = pi * (2 * k * p) / q;
      BigFloat t2 = pi * k / q;
      mpfr_cos(c.get(), t1.get(), MPFR_RNDN);
      mpfr_sin(s.get(), t2.get(), MPFR_RNDN);
      base += c * elem(Fn::Log, s) * 2;
    }
  }
  // psi(frac + m) = psi(frac) + sum_{j=0}^{m-1} 1/(frac + j); negative m goes down.
  long m = fl.get_si();
  mpq_class corr = 0;
  if (m >= 0) {
    for (long j = 0; j < m; ++j) corr += 1 / (frac + j);
  } else {
    for (long j = -1; j >= m; --j) corr -= 1 / (frac + j);
  }
  return (base + BigFloat(corr, w)).rounded(bits);
}

namespace alt {

BigFloat pi_machin(Bits bits) {
  Bits w = working(bits);
  BigFloat pi = arctan_inverse(5, w) * 16 - arctan_inverse(239, w) * 4;
  return pi.rounded(bits);
}

BigFloat gamma_euler_maclaurin(Bits bits) {
  Bits w = working(bits) + 8;
  long n = std::max<long>(16, static_cast<long>(w / 2));
  BigFloat h(w);
  for (long k = n; k >= 1; --k) h += BigFloat(1, w) / k;
  BigFloat nf(n, w);
  BigFloat g = h - log_of_integer(mpz_class(n), w) - BigFloat(1, w) / (2 * n);
  BigFloat inv_n2 = BigFloat(1, w) / (nf * nf);
  BigFloat npow = inv_n2;
  BigFloat threshold = BigFloat::pow2(-w, w);
  for (int j = 1; j < 400; ++j) {
    BigFloat t = BigFloat(bernoulli(2 * j) / (2 * j), w) * npow;
    g += t;
    if (abs(t) < threshold) break;
    npow *= inv_n2;
  }
  return g.rounded(bits);
}

BigFloat catalan_alternating(Bits bits) {
  BigFloat s = alternating_sum(working(bits), [](long k, Bits w) {
    long d = 2 * k + 1;
    return BigFloat(1, w) / d / d;
  });
  return s.rounded(bits);
}

BigFloat zeta3_apery(Bits bits) {
  Bits w = working(bits);
  mpz_class binom(1);
  BigFloat sum(w);
  BigFloat threshold = BigFloat::pow2(-w - 4, w);
  for (long k = 1;; ++k) {
    binom = binom * (2 * k) * (2 * k - 1) / (k * k);
    mpz_class den = binom * k * k * k;
    BigFloat t = BigFloat(1, w) / BigFloat(den, w);
    if (k % 2 == 1) sum += t; else sum -= t;
    if (t < threshold) break;
  }
  return (sum * 5 / 2).rounded(bits);
}

BigFloat zeta_alternating(int k, Bits bits) {
  if (k < 2) throw DomainError("zeta requires k >= 2");
  Bits w = working(bits);
  BigFloat eta = alternating_sum(w, [k](long j, Bits wb) { return pow(BigFloat(j + 1, wb), -k); });
  BigFloat factor = BigFloat(1, w) - BigFloat::pow2(1 - k, w);
  return (eta / factor).rounded(bits);
}

BigFloat digamma_asymptotic(const BigFloat& x) {
  if (x.sign() <= 0) throw DomainError("digamma_asymptotic requires x > 0");
  Bits bits = x.precision();
  Bits w = working(bits) + 8;
  long shift = static_cast<long>(w / 2) + 8;
  BigFloat xw = x.rounded(w);
  BigFloat corr(w);
  for (long j = 0; j < shift; ++j) corr += BigFloat(1, w) / (xw + j);
  BigFloat y = xw + shift;
  BigFloat result = elem(Fn::Log, y) - BigFloat(1, w) / (y * 2);
  BigFloat inv_y2 = BigFloat(1, w) / (y * y);
  BigFloat ypow = inv_y2;
  BigFloat threshold = BigFloat::pow2(-w, w);
  for (int i = 1; i < 400; ++i) {
    BigFloat t = BigFloat(bernoulli(2 * i) / (2 * i), w) * ypow;
    result -= t;
    if (abs(t) < threshold) break;
    ypow *= inv_y2;
  }
  return (result - corr).rounded(bits);
}

}  // namespace alt

}  // namespace cfforge::mpval
