#include "cfforge/cfengine.hpp"

#include "cfforge/errors.hpp"
#include "cfforge/mpval.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace cfforge {

namespace {

bool tiny(const BigFloat& x, Bits bits) { return x.is_zero() || x.log2_abs() < -static_cast<double>(bits) / 2; }

std::shared_ptr<const IntegerRational> integer_form(const std::optional<RationalFunction>& r) {
  if (!r) return nullptr;
  return std::make_shared<const IntegerRational>(*r);
}

mpq_class exact_value(const IntegerRational& r, long n, const char* name) {
  mpz_class num;
  mpz_class den;
  r.eval(n, num, den);
  if (sgn(den) == 0) throw PoleAtIndex(n, std::string(name) + " has a pole");
  mpq_class out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace

// ------------------------------------------------------------------ CFSpec

CFSpec CFSpec::create(Expr f, Expr g, SpecOptions options) {
  CFSpec s;
  s.f_ = std::move(f);
  s.g_ = std::move(g);
  s.f_rational_ = as_rational_function(s.f_);
  s.g_rational_ = as_rational_function(s.g_);
  s.f_int_ = integer_form(s.f_rational_);
  s.g_int_ = integer_form(s.g_rational_);

  // A float value counts as zero unless its leading bits are stable when the
  // precision is doubled; exponentially small values are not zero.
  auto is_zero = [&](bool is_f, long n) {
    const auto& ir = is_f ? s.f_int_ : s.g_int_;
    const Expr& e = is_f ? s.f_ : s.g_;
    if (ir) return sgn(exact_value(*ir, n, is_f ? "f" : "g")) == 0;
    if (auto exact = eval_rational(e, mpq_class(n))) return sgn(*exact) == 0;
    Bits lo = options.check_bits;
    BigFloat v1 = eval_float(e, BigFloat(n, lo), lo);
    BigFloat v2 = eval_float(e, BigFloat(n, 2 * lo), 2 * lo);
    if (v1.is_zero() || v2.is_zero()) return true;
    return !tiny(abs(v1 - v2) / abs(v2), lo);
  };

  try {
    // f(0) = 0 keeps the initial conditions p_{-1} = 1, q_{-1} = 0 consistent.
    if (!is_zero(true, 0)) throw InvalidSpec("f(0) must be 0 for " + s.describe());
    for (long n = 0; n <= options.n_check; ++n) {
      if (n >= 1 && is_zero(true, n)) {
        throw InvalidSpec("f(" + std::to_string(n) + ") = 0 for " + s.describe());
      }
      if (is_zero(false, n)) throw InvalidSpec("g(" + std::to_string(n) + ") = 0 for " + s.describe());
    }
  } catch (const PoleAtIndex& err) {
    throw InvalidSpec(std::string("pole while validating spec: ") + err.what());
  } catch (const DivisionByZero& err) {
    throw InvalidSpec(std::string("pole while validating spec: ") + err.what());
  } catch (const DomainError& err) {
    throw InvalidSpec(std::string("domain error while validating spec: ") + err.what());
  }
  return s;
}

CFSpec CFSpec::parse(const std::string& f, const std::string& g, SpecOptions options) {
  ParseOptions po{true};
  return create(cfforge::parse(f, po), cfforge::parse(g, po), options);
}

mpq_class CFSpec::f_at(long n) const {
  if (f_int_) return exact_value(*f_int_, n, "f");
  throw InvalidSpec("f is not exactly evaluable: " + render(f_));
}

mpq_class CFSpec::g_at(long n) const {
  if (g_int_) return exact_value(*g_int_, n, "g");
  throw InvalidSpec("g is not exactly evaluable: " + render(g_));
}

BigFloat CFSpec::f_at(long n, Bits bits) const {
  if (f_int_) return BigFloat(f_at(n), bits);
  try {
    return eval_float(f_, BigFloat(n, bits), bits);
  } catch (const DivisionByZero& err) {
    throw PoleAtIndex(n, err.what());
  }
}

BigFloat CFSpec::g_at(long n, Bits bits) const {
  if (g_int_) return BigFloat(g_at(n), bits);
  try {
    return eval_float(g_, BigFloat(n, bits), bits);
  } catch (const DivisionByZero& err) {
    throw PoleAtIndex(n, err.what());
  }
}

std::string CFSpec::describe() const { return "{f = " + render(f_) + ", g = " + render(g_) + "}"; }

// ------------------------------------------------------------------ terms

std::string to_string(const Scalar& s, int digits) {
  if (const auto* q = std::get_if<mpq_class>(&s)) return q->get_str();
  return std::get<BigFloat>(s).to_string(digits);
}

BigFloat to_bigfloat(const Scalar& s, Bits bits) {
  if (const auto* q = std::get_if<mpq_class>(&s)) return BigFloat(*q, bits);
  return std::get<BigFloat>(s).rounded(bits);
}

Scalar a_n(const CFSpec& spec, long n, Bits bits) {
  if (n < 1) throw std::invalid_argument("a_n is defined for n >= 1");
  if (spec.exact()) {
    mpq_class f = spec.f_at(n);
    return mpq_class(-f * f);
  }
  BigFloat f = spec.f_at(n, bits);
  return -(f * f);
}

Scalar b_n(const CFSpec& spec, long n, Bits bits) {
  if (n < 0) throw std::invalid_argument("b_n is defined for n >= 0");
  if (spec.exact()) {
    mpq_class g = spec.g_at(n);
    if (sgn(g) == 0) throw PoleAtIndex(n, "g vanishes");
    mpq_class top = spec.f_at(n + 1) * spec.g_at(n + 1);
    if (n > 0) top += spec.f_at(n) * spec.g_at(n - 1);
    return mpq_class(top / g);
  }
  Bits w = bits + mpval::kGuardBits;
  BigFloat g = spec.g_at(n, w);
  if (g.is_zero()) throw PoleAtIndex(n, "g vanishes");
  BigFloat top = spec.f_at(n + 1, w) * spec.g_at(n + 1, w);
  if (n > 0) top += spec.f_at(n, w) * spec.g_at(n - 1, w);
  return (top / g).rounded(bits);
}

Expr b_n_expr(const CFSpec& spec) {
  const Expr& f = spec.f();
  const Expr& g = spec.g();
  return expr::div(expr::add(expr::mul(shift(f, 1), shift(g, 1)), expr::mul(f, shift(g, -1))), g);
}

// ------------------------------------------------------------------ convergents

Convergents<mpq_class> iterate_exact(const CFSpec& spec, long N, long max_bits) {
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  if (!spec.exact()) throw InvalidSpec("exact iteration needs rational f and g: " + spec.describe());
  Convergents<mpq_class> st{mpq_class(1), std::get<mpq_class>(b_n(spec, 0)), mpq_class(0), mpq_class(1), 0, 0};
  for (long k = 1; k <= N; ++k) {
    mpq_class a = std::get<mpq_class>(a_n(spec, k));
    mpq_class b = std::get<mpq_class>(b_n(spec, k));
    mpq_class p = b * st.p + a * st.p_prev;
    mpq_class q = b * st.q + a * st.q_prev;
    st.p_prev = std::move(st.p);
    st.q_prev = std::move(st.q);
    st.p = std::move(p);
    st.q = std::move(q);
    st.n = k;
    auto size = [](const mpq_class& x) {
      return static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 2) + mpz_sizeinbase(x.get_den_mpz_t(), 2));
    };
    if (size(st.p) > max_bits || size(st.q) > max_bits) {
      throw OverflowBudget("exact convergents exceed " + std::to_string(max_bits) + " bits at n = " +
                           std::to_string(k));
    }
  }
  return st;
}

namespace {

/// Sliding float evaluation of the recurrence; exact specs evaluate a_n, b_n
/// exactly and round once.
class FloatRecurrence {
 public:
  FloatRecurrence(const CFSpec& spec, Bits bits) : spec_(spec), bits_(bits) { reset(); }

  void reset() {
    st_ = Convergents<BigFloat>{BigFloat(1, bits_), to_bigfloat(b_n(spec_, 0, bits_), bits_), BigFloat(0, bits_),
                                BigFloat(1, bits_), 0, 0};
  }

  void step() {
    long k = st_.n + 1;
    BigFloat a = to_bigfloat(a_n(spec_, k, bits_), bits_);
    BigFloat b = to_bigfloat(b_n(spec_, k, bits_), bits_);
    BigFloat p = b * st_.p + a * st_.p_prev;
    BigFloat q = b * st_.q + a * st_.q_prev;
    st_.p_prev = std::move(st_.p);
    st_.q_prev = std::move(st_.q);
    st_.p = std::move(p);
    st_.q = std::move(q);
    st_.n = k;
    // keep exponents bounded with an exact common power-of-two factor
    if (!st_.p.is_zero() && std::labs(st_.p.exponent()) > 4096) {
      long e = st_.p.exponent();
      st_.p = ldexp(st_.p, -e);
      st_.p_prev = ldexp(st_.p_prev, -e);
      st_.q = ldexp(st_.q, -e);
      st_.q_prev = ldexp(st_.q_prev, -e);
      st_.scale_log2 += e;
    }
  }

  const Convergents<BigFloat>& state() const { return st_; }
  BigFloat ratio() const {
    if (st_.p.is_zero()) throw PoleAtIndex(st_.n, "p_n vanishes");
    return st_.q / st_.p;
  }

 private:
  const CFSpec& spec_;
  Bits bits_;
  Convergents<BigFloat> st_;
};

}  // namespace

Convergents<BigFloat> iterate_float(const CFSpec& spec, long N, Bits bits) {
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  FloatRecurrence rec(spec, bits);
  while (rec.state().n < N) rec.step();
  return rec.state();
}

ConvergentState iterate_cf(const CFSpec& spec, long N, Mode mode, Bits bits) {
  if (mode == Mode::Exact) return iterate_exact(spec, N);
  return iterate_float(spec, N, bits);
}

mpq_class partial_sum(const CFSpec& spec, long N) {
  mpq_class g0 = spec.g_at(0);
  mpq_class sum = 0;
  mpq_class g_cur = g0;
  for (long i = 0; i <= N; ++i) {
    mpq_class g_next = spec.g_at(i + 1);
    sum += 1 / (spec.f_at(i + 1) * g_cur * g_next);
    g_cur = std::move(g_next);
  }
  return g0 * g0 * sum;
}

mpq_class F(const CFSpec& spec, long n) {
  mpq_class out = 1;
  for (long i = 1; i <= n + 1; ++i) out *= spec.f_at(i);
  return out;
}

// ------------------------------------------------------------------ series

namespace {

/// Random-access series terms t(i) = g(0)^2 / (f(i+1) g(i) g(i+1)) at a fixed precision.
class Terms {
 public:
  Terms(const CFSpec& spec, Bits bits) : spec_(spec), bits_(bits) {
    if (spec.exact()) {
      const RationalFunction& f = *spec.f_rational();
      const RationalFunction& g = *spec.g_rational();
      mpq_class g0 = spec.g_at(0);
      RationalFunction t = RationalFunction(QPolynomial::constant(g0 * g0)) / (f.shifted(1) * g * g.shifted(1));
      exact_ = std::make_shared<IntegerRational>(t);
    } else {
      BigFloat g0 = spec.g_at(0, bits);
      g0_sq_ = g0 * g0;
    }
  }

  BigFloat operator()(long i) const {
    if (exact_) {
      mpz_class num;
      mpz_class den;
      exact_->eval(i, num, den);
      if (sgn(den) == 0) throw PoleAtIndex(i, "series term has a pole");
      return BigFloat(num, bits_) / BigFloat(den, bits_);
    }
    BigFloat d = spec_.f_at(i + 1, bits_) * spec_.g_at(i, bits_) * spec_.g_at(i + 1, bits_);
    if (d.is_zero()) throw PoleAtIndex(i, "series term has a pole");
    return g0_sq_ / d;
  }

 private:
  const CFSpec& spec_;
  Bits bits_;
  std::shared_ptr<IntegerRational> exact_;
  BigFloat g0_sq_;
};

/// Sequence of approximations S(N) for increasing N.
class PartialSource {
 public:
  virtual ~PartialSource() = default;
  virtual void reset() = 0;
  /// Value after N terms (N >= current position).
  virtual BigFloat advance_to(long N) = 0;
};

class SeriesSource : public PartialSource {
 public:
  SeriesSource(const Terms& terms, Bits bits) : terms_(terms), bits_(bits), sum_(bits) {}
  void reset() override {
    pos_ = 0;
    sum_ = BigFloat(bits_);
  }
  BigFloat advance_to(long N) override {
    for (; pos_ < N; ++pos_) sum_ += terms_(pos_);
    return sum_;
  }
  long position() const { return pos_; }

 private:
  const Terms& terms_;
  Bits bits_;
  long pos_ = 0;
  BigFloat sum_;
};

class CFSource : public PartialSource {
 public:
  CFSource(const CFSpec& spec, Bits bits) : rec_(spec, bits) {}
  void reset() override { rec_.reset(); }
  // N terms of the series correspond to q_{N-1} / p_{N-1}.
  BigFloat advance_to(long N) override {
    while (rec_.state().n < N - 1) rec_.step();
    return rec_.ratio();
  }

 private:
  FloatRecurrence rec_;
};

struct Extrapolation {
  BigFloat value;
  BigFloat estimate;
  long n_terms = 0;
  bool converged = false;
};

/// Polynomial extrapolation to 1/N -> 0 (Neville) over checkpoints N_j = n0 (j + 1).
Extrapolation extrapolate(PartialSource& src, long n0, int max_points, Bits target, Bits w) {
  src.reset();
  std::vector<long> nodes;
  std::vector<BigFloat> row;  // row[k] = P_{j-k..j}(0) for the latest j
  BigFloat prev_diag(w);
  BigFloat best_diff(w);
  Extrapolation out{BigFloat(w), BigFloat(w)};
  int small_in_a_row = 0;
  for (int j = 0; j < max_points; ++j) {
    long N = n0 * (j + 1);
    nodes.push_back(N);
    std::vector<BigFloat> next;
    next.reserve(static_cast<std::size_t>(j) + 1);
    next.push_back(src.advance_to(N));
    for (int k = 1; k <= j; ++k) {
      long ni = nodes[static_cast<std::size_t>(j - k)];
      // P_{i..j} = (N_j P_{i+1..j} - N_i P_{i..j-1}) / (N_j - N_i)
      BigFloat v = (next[static_cast<std::size_t>(k - 1)] * N - row[static_cast<std::size_t>(k - 1)] * ni) / (N - ni);
      next.push_back(std::move(v));
    }
    row = std::move(next);
    const BigFloat& diag = row.back();
    out.n_terms = N;
    if (j >= 1) {
      BigFloat diff = abs(diag - prev_diag);
      double scale = std::max(0.0, diag.log2_abs());
      bool small = diff.is_zero() || diff.log2_abs() < -static_cast<double>(target) - 8 + scale;
      small_in_a_row = small ? small_in_a_row + 1 : 0;
      if (j == 1 || diff < best_diff) best_diff = diff;
      out.value = diag;
      out.estimate = diff * 10;
      if (small_in_a_row >= 2) {
        out.converged = true;
        return out;
      }
      // an asymptotic expansion that started to diverge will not recover
      if (j > 12 && !best_diff.is_zero() && diff.log2_abs() > best_diff.log2_abs() + 24) return out;
    } else {
      out.value = diag;
    }
    prev_diag = diag;
  }
  return out;
}

enum class Decay { Geometric, Polynomial };

Decay classify(const Terms& t, Bits w) {
  std::vector<double> logs;
  for (int j = 6; j <= 13; ++j) {
    long i = 1L << j;
    BigFloat v = t(i);
    if (v.is_zero()) v = t(i + 1);
    if (v.is_zero()) throw IrregularTerms("series terms vanish at n = " + std::to_string(i));
    logs.push_back(v.log2_abs());
  }
  std::vector<double> d;
  for (std::size_t k = 0; k + 1 < logs.size(); ++k) d.push_back(logs[k] - logs[k + 1]);
  double last = d.back();
  double before = d[d.size() - 2];
  if (last > 8 && last > 1.8 * before) return Decay::Geometric;
  if (last < 1.5) {
    std::ostringstream msg;
    msg << "terms decay like n^-" << last << " (need degree >= 2)";
    throw DivergentSeries(msg.str());
  }
  // sign and monotonicity over a window
  BigFloat prev = t(64);
  int sign = prev.sign();
  for (long i = 65; i <= 128; ++i) {
    BigFloat cur = t(i);
    if (cur.sign() != sign) throw IrregularTerms("series terms change sign near n = " + std::to_string(i));
    if (abs(cur) > abs(prev)) throw IrregularTerms("series terms are not decreasing near n = " + std::to_string(i));
    prev = std::move(cur);
  }
  (void)w;
  return Decay::Polynomial;
}

}  // namespace

SeriesResult sum_series(const CFSpec& spec, Bits bits, SeriesOptions options) {
  Bits w = bits + 128;
  Terms terms(spec, w);
  Decay decay = classify(terms, w);
  BigFloat floor_est = BigFloat::pow2(-(bits + 32), bits);

  SeriesResult out{BigFloat(bits), 0, BigFloat(bits), false, "", BigFloat(bits), BigFloat(bits)};
  if (decay == Decay::Geometric) {
    BigFloat sum(w);
    BigFloat last(w);
    long i = 0;
    for (;; ++i) {
      if (i >= options.max_terms) throw SlowConvergence("term budget exhausted for " + spec.describe());
      last = terms(i);
      sum += last;
      if (i >= 128 && (last.is_zero() || last.log2_abs() < sum.log2_abs() - static_cast<double>(w))) break;
    }
    out.value = sum.rounded(bits);
    out.n_terms = i + 1;
    BigFloat est = abs(last) * 4;
    out.error_estimate = est > floor_est ? est.rounded(bits) : floor_est;
    out.method = "geometric";

    FloatRecurrence rec(spec, w);
    BigFloat prev = rec.ratio();
    BigFloat diff(w);
    while (rec.state().n < out.n_terms - 1) {
      rec.step();
      BigFloat cur = rec.ratio();
      diff = abs(cur - prev);
      prev = std::move(cur);
    }
    out.cf_value = prev.rounded(bits);
    BigFloat cf_est = diff * 4;
    out.cf_error_estimate = cf_est > floor_est ? cf_est.rounded(bits) : floor_est;
    return out;
  }

  constexpr int kMaxPoints = 48;
  SeriesSource series(terms, w);
  long n0 = 64;
  Extrapolation ex;
  for (;;) {
    if (n0 * kMaxPoints > options.max_terms && n0 > 64) {
      throw SlowConvergence("extrapolation did not converge within " + std::to_string(options.max_terms) +
                            " terms for " + spec.describe());
    }
    int points = static_cast<int>(std::min<long>(kMaxPoints, options.max_terms / n0));
    if (points < 3) throw SlowConvergence("term budget too small for " + spec.describe());
    ex = extrapolate(series, n0, points, bits, w);
    if (ex.converged) break;
    n0 *= 4;
  }
  out.value = ex.value.rounded(bits);
  out.n_terms = ex.n_terms;
  out.error_estimate = ex.estimate > floor_est ? ex.estimate.rounded(bits) : floor_est;
  out.method = "extrapolated";

  CFSource cf(spec, w);
  int points = static_cast<int>(ex.n_terms / n0);
  Extrapolation cx = extrapolate(cf, n0, points, bits, w);
  out.cf_value = cx.value.rounded(bits);
  out.cf_error_estimate = cx.estimate > floor_est ? cx.estimate.rounded(bits) : floor_est;
  return out;
}

VerifyReport verify_identity(const CFSpec& spec, const Expr& closed_form, Bits bits, int agreement_digits,
                             SeriesOptions options) {
  if (contains_var(closed_form)) throw InvalidSpec("closed form must be a constant expression");
  SeriesResult s = sum_series(spec, bits, options);
  VerifyReport r;
  r.precision_bits = bits;
  r.series_value = s.value;
  r.cf_value = s.cf_value;
  r.series_estimate = s.error_estimate;
  r.n_terms = s.n_terms;
  // extra bits absorb cancellation inside large-coefficient closed forms
  r.closed_value = eval_float(closed_form, bits + 128).rounded(bits);
  r.abs_err = abs(s.value - r.closed_value);
  BigFloat tol = BigFloat::from_decimal("1e-" + std::to_string(agreement_digits), bits);
  BigFloat cf_gap = abs(s.cf_value - s.value);
  BigFloat cf_tol = s.cf_error_estimate + s.error_estimate + BigFloat::pow2(-bits, bits);
  r.verified = r.abs_err < tol && cf_gap <= cf_tol;
  return r;
}

}  // namespace cfforge
