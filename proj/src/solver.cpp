#include "cfforge/solver.hpp"

#include "cfforge/cfengine.hpp"
#include "cfforge/errors.hpp"

#include <algorithm>

namespace cfforge {

namespace {

std::optional<mpq_class> rational_sqrt(const mpq_class& x) {
  if (sgn(x) < 0) return std::nullopt;
  mpz_class n = x.get_num();
  mpz_class d = x.get_den();
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0 || mpz_perfect_square_p(d.get_mpz_t()) == 0) return std::nullopt;
  mpz_class rn;
  mpz_class rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return mpq_class(rn, rd);
}

using Matrix = std::vector<std::vector<mpq_class>>;

/// In-place reduced row echelon form; returns the pivot column of each row.
std::vector<int> rref(Matrix& m, int cols) {
  std::vector<int> pivots;
  std::size_t row = 0;
  for (int c = 0; c < cols && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && sgn(m[p][static_cast<std::size_t>(c)]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    mpq_class inv = 1 / m[row][static_cast<std::size_t>(c)];
    for (auto& v : m[row]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || sgn(m[r][static_cast<std::size_t>(c)]) == 0) continue;
      mpq_class t = m[r][static_cast<std::size_t>(c)];
      for (int k = 0; k < cols; ++k) m[r][static_cast<std::size_t>(k)] -= t * m[row][static_cast<std::size_t>(k)];
    }
    pivots.push_back(c);
    ++row;
  }
  m.resize(row);
  return pivots;
}

std::vector<std::vector<mpq_class>> nullspace(Matrix m, int cols) {
  std::vector<int> pivots = rref(m, cols);
  std::vector<std::vector<mpq_class>> out;
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    std::vector<mpq_class> v(static_cast<std::size_t>(cols));
    v[static_cast<std::size_t>(free)] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[static_cast<std::size_t>(pivots[r])] = -m[r][static_cast<std::size_t>(free)];
    }
    out.push_back(std::move(v));
  }
  return out;
}

/// Columns P_j of the cleared functional equation for g = n^j, j = 0..d.
std::vector<QPolynomial> residual_columns(const RationalFunction& f, const RationalFunction& b, int d) {
  QPolynomial clear = b.den() * f.shifted(1).den() * f.den();
  std::vector<QPolynomial> cols;
  for (int j = 0; j <= d; ++j) {
    RationalFunction r = functional_residual(f, b, QPolynomial::monomial(1, j));
    auto [q, rem] = divmod(r.num() * clear, r.den());
    if (!rem.is_zero()) throw std::logic_error("residual denominator does not divide the common denominator");
    cols.push_back(q);
  }
  return cols;
}

bool has_integer_root_at_least(const QPolynomial& p, long lo) {
  if (p.is_zero()) return true;
  for (const auto& r : rational_roots(p)) {
    if (r.get_den() == 1 && r >= lo) return true;
  }
  return false;
}

std::string linear_form(const mpq_class& c1, const mpq_class& c0) {
  std::string out;
  auto term = [&](const mpq_class& c, const std::string& name) {
    if (sgn(c) == 0) return;
    mpq_class a = abs(c);
    std::string body = a == 1 ? name : a.get_str() + "*" + name;
    if (out.empty()) {
      out = sgn(c) < 0 ? "-" + body : body;
    } else {
      out += sgn(c) < 0 ? " - " : " + ";
      out += body;
    }
  };
  term(c1, "eta1");
  term(c0, "eta0");
  return out.empty() ? "0" : out;
}

/// The given continued fraction b(0) + a(1)/(b(1) + a(2)/(b(2) + ...)) at depth N.
BigFloat iterate_given(const RationalFunction& a, const RationalFunction& b, long N, Bits bits) {
  IntegerRational ai(a);
  IntegerRational bi(b);
  BigFloat p_prev(1, bits);
  BigFloat p(bi.eval(0), bits);
  BigFloat q_prev(0, bits);
  BigFloat q(1, bits);
  for (long n = 1; n <= N; ++n) {
    BigFloat an(ai.eval(n), bits);
    BigFloat bn(bi.eval(n), bits);
    BigFloat p_next = bn * p + an * p_prev;
    BigFloat q_next = bn * q + an * q_prev;
    p_prev = std::move(p);
    p = std::move(p_next);
    q_prev = std::move(q);
    q = std::move(q_next);
    if (!q.is_zero() && std::abs(q.exponent()) > 4096) {
      long e = -q.exponent();
      p = ldexp(p, e);
      p_prev = ldexp(p_prev, e);
      q = ldexp(q, e);
      q_prev = ldexp(q_prev, e);
    }
  }
  if (q.is_zero()) throw DivisionByZero("convergent denominator q_" + std::to_string(N) + " vanished");
  return p / q;
}

RationalFunction to_rational(const Expr& e, const char* which) {
  auto r = as_rational_function(e);
  if (!r) throw InvalidSpec(std::string(which) + " is not a rational function of n: " + render(e));
  return *r;
}

struct Candidate {
  RationalFunction f;
  QPolynomial g;
  mpq_class scale;
  std::string route;
};

/// Fills checks, closed form and values; returns false when the candidate is unusable.
bool evaluate(const Candidate& c, const RationalFunction& ra, const RationalFunction& rb, const ProveOptions& opt,
              ProofResult& out) {
  out = ProofResult{};
  out.f = c.f;
  out.g = c.g;
  out.scale = c.scale;
  out.route = c.route;

  // exact re-check of a and b by expansion
  const RationalFunction& f = c.f;
  RationalFunction g(c.g);
  RationalFunction g_prev = g.shifted(-1);
  RationalFunction s(QPolynomial::constant(c.scale));
  RationalFunction a_rebuilt;
  RationalFunction b_rebuilt;
  if (c.route == "square") {
    a_rebuilt = -(f * f);
    b_rebuilt = (f.shifted(1) * g.shifted(1) + f * g_prev) / g;
  } else {
    a_rebuilt = -(s * s * f * f * g * g_prev);
    b_rebuilt = s * (f.shifted(1) * g.shifted(1) + f * g_prev);
  }
  if (!(a_rebuilt == ra) || !(b_rebuilt == rb)) {
    out.diagnostics.push_back("g = " + c.g.render() + " does not reproduce a and b");
    return false;
  }
  // degree of b g = f(n+1) g(n+1) + f(n) g(n-1) once denominators are cleared
  RationalFunction lhs = f.shifted(1) * g.shifted(1) + f * g_prev;
  QPolynomial clear = lhs.den() * g.den();
  int clear_degree = std::max((f.shifted(1) * g.shifted(1) * RationalFunction(clear)).num().degree(),
                              (f * g_prev * RationalFunction(clear)).num().degree());
  out.checks.functional_identity_verified_degree = clear_degree;

  // f(0) = 0, non-vanishing of f(n), n >= 1, and g(n), n >= 0
  bool f_pole_at_zero = sgn(f.den().eval(mpq_class(0))) == 0;
  out.checks.f0_zero = !f_pole_at_zero && sgn(f.num().eval(mpq_class(0))) == 0;
  if (!out.checks.f0_zero) out.diagnostics.push_back("f(0) != 0 for f = " + f.render());
  if (has_integer_root_at_least(f.num(), 1) || has_integer_root_at_least(f.den(), 1)) {
    out.diagnostics.push_back("f = " + f.render() + " vanishes or has a pole at some n >= 1");
    return false;
  }
  if (has_integer_root_at_least(c.g, 0)) {
    out.diagnostics.push_back("g = " + c.g.render() + " vanishes at some n >= 0");
    return false;
  }
  mpq_class g0 = c.g.eval(mpq_class(0));
  mpq_class f1g1 = f.eval(mpq_class(1)) * c.g.eval(mpq_class(1));
  mpq_class b0 = rb.eval(mpq_class(0));
  if (c.route == "square") {
    out.offset = b0 - f1g1 / g0;
    out.multiplier = 1;
  } else {
    out.offset = b0 - c.scale * f1g1;
    out.multiplier = c.scale * g0;
  }
  out.checks.b0_consistent = sgn(out.offset) == 0;
  if (!out.checks.b0_consistent) {
    out.diagnostics.push_back("b(0) = " + b0.get_str() + " differs from the initial condition by " + out.offset.get_str());
  }
  if (!out.checks.f0_zero) return false;

  CFSpec spec = CFSpec::create(parse(f.render()), parse(c.g.render()));
  BigFloat S(opt.bits);
  try {
    out.closed_form = closed_form_for(spec);
    S = eval_closed_form(*out.closed_form, opt.bits + 16);
  } catch (const Unsupported& err) {
    out.diagnostics.push_back(std::string("no closed form: ") + err.what());
  }
  if (!out.closed_form) S = sum_series(spec, opt.bits + 16).value;
  out.value = (BigFloat(out.offset, opt.bits + 16) + BigFloat(out.multiplier, opt.bits + 16) / S).rounded(opt.bits);

  // independent check on the given fraction itself
  BigFloat d1 = iterate_given(ra, rb, 2048, opt.bits);
  BigFloat d2 = iterate_given(ra, rb, 4096, opt.bits);
  out.direct_value = d2;
  out.direct_error = abs(d2 - d1);
  BigFloat gap = abs(*out.value - d2);
  BigFloat allowed = *out.direct_error * 2 + BigFloat::pow2(-static_cast<long>(opt.bits) / 2, opt.bits);
  bool numeric_ok = gap <= allowed;
  if (!numeric_ok) out.diagnostics.push_back("direct iteration of a, b disagrees by " + gap.to_string(6));

  if (out.closed_form && out.checks.b0_consistent && numeric_ok) {
    out.status = ProofResult::Status::Proved;
  } else if (numeric_ok) {
    out.status = ProofResult::Status::Candidate;
  } else {
    out.status = ProofResult::Status::Failed;
  }
  return true;
}

}  // namespace

std::optional<QPolynomial> poly_sqrt(const QPolynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("poly_sqrt of the zero polynomial");
  if (p.degree() % 2 != 0) return std::nullopt;
  auto lead = rational_sqrt(p.leading());
  if (!lead) return std::nullopt;
  QPolynomial q = QPolynomial::constant(*lead);
  for (const auto& [factor, mult] : square_free(p)) {
    if (mult % 2 != 0) return std::nullopt;
    q *= pow(factor, mult / 2);
  }
  return q;
}

std::optional<RationalFunction> poly_sqrt(const RationalFunction& r) {
  if (r.is_zero()) throw std::invalid_argument("poly_sqrt of the zero function");
  auto n = poly_sqrt(r.num());
  auto d = poly_sqrt(r.den());
  if (!n || !d) return std::nullopt;
  return RationalFunction(*n, *d);
}

RationalFunction functional_residual(const RationalFunction& f, const RationalFunction& b, const QPolynomial& g) {
  RationalFunction gr(g);
  return b * gr - f.shifted(1) * gr.shifted(1) - f * gr.shifted(-1);
}

std::vector<QPolynomial> solve_g(const RationalFunction& f, const RationalFunction& b, int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("max_degree must be >= 0");
  std::vector<QPolynomial> cols = residual_columns(f, b, max_degree);
  int rows = 0;
  for (const auto& c : cols) rows = std::max(rows, c.degree() + 1);
  int ncols = max_degree + 1;
  Matrix m(static_cast<std::size_t>(rows), std::vector<mpq_class>(static_cast<std::size_t>(ncols)));
  for (int j = 0; j < ncols; ++j) {
    for (int k = 0; k < rows; ++k) m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j)].coeff(k);
  }
  auto basis = nullspace(std::move(m), ncols);
  if (basis.empty()) return {};

  // echelon form with columns ordered from high to low degree: each row gets
  // a distinct degree and no row carries another row's leading term
  Matrix e;
  for (const auto& v : basis) e.emplace_back(v.rbegin(), v.rend());
  rref(e, ncols);
  std::vector<QPolynomial> out;
  for (const auto& row : e) {
    std::vector<mpq_class> coeffs(row.rbegin(), row.rend());
    out.push_back(QPolynomial(std::move(coeffs)).primitive());
  }
  std::sort(out.begin(), out.end(), [](const QPolynomial& x, const QPolynomial& y) { return x.degree() < y.degree(); });
  return out;
}

QuarticCandidate normalize_quartic(const mpq_class& alpha, const mpq_class& beta, const mpq_class& gamma) {
  mpq_class beta1 = beta - alpha;
  mpq_class gamma1 = gamma - alpha;
  if (beta1 == gamma1) throw Degenerate("beta1 = gamma1 = " + beta1.get_str() + ": cannot divide by (gamma1 - beta1)^2");
  return {QPolynomial{0, 1}, QPolynomial(std::vector<mpq_class>{beta1, gamma1 - beta1})};
}

std::string to_string(ProofResult::Status s) {
  switch (s) {
    case ProofResult::Status::Proved: return "proved";
    case ProofResult::Status::Candidate: return "candidate";
    case ProofResult::Status::Failed: return "failed";
  }
  return "failed";
}

ProofResult prove(const Expr& a, const Expr& b, ProveOptions options) {
  RationalFunction ra = to_rational(a, "a");
  RationalFunction rb = to_rational(b, "b");
  if (ra.is_zero()) throw InvalidSpec("a is identically zero");

  std::vector<Candidate> candidates;
  std::vector<std::string> notes;
  RationalFunction neg_a = -ra;
  if (auto f = poly_sqrt(neg_a)) {
    for (const RationalFunction& fs : {*f, -*f}) {
      for (const auto& g : solve_g(fs, rb, options.max_degree)) candidates.push_back({fs, g, 1, "square"});
    }
  } else {
    notes.push_back("-a = " + neg_a.render() + " is not a perfect square");
    // -a = c (n + alpha)^2 (n + beta)(n + gamma)
    if (neg_a.is_polynomial() && neg_a.num().degree() == 4) {
      Factorization fac = factor_shifts(neg_a.num());
      if (fac.complete()) {
        std::vector<mpq_class> roots;
        for (const auto& lf : fac.factors) {
          for (int i = 0; i < lf.multiplicity; ++i) roots.push_back(lf.shift);
        }
        for (const auto& lf : fac.factors) {
          if (lf.multiplicity < 2) continue;
          std::vector<mpq_class> rest = roots;
          rest.erase(std::find(rest.begin(), rest.end(), lf.shift));
          rest.erase(std::find(rest.begin(), rest.end(), lf.shift));
          for (int order = 0; order < 2; ++order) {
            const mpq_class& beta = rest[static_cast<std::size_t>(order)];
            const mpq_class& gamma = rest[static_cast<std::size_t>(1 - order)];
            std::vector<std::pair<QPolynomial, QPolynomial>> pairs;
            try {
              auto q = normalize_quartic(lf.shift, beta, gamma);
              pairs.emplace_back(q.f, q.g);
            } catch (const Degenerate& err) {
              notes.push_back(err.what());
            }
            pairs.emplace_back(QPolynomial::linear(lf.shift), QPolynomial::linear(beta));
            for (const auto& [f, g] : pairs) {
              // s from b = s (f(n+1) g(n+1) + f(n) g(n-1))
              RationalFunction fr(f);
              RationalFunction gr(g);
              RationalFunction base = fr.shifted(1) * gr.shifted(1) + fr * gr.shifted(-1);
              if (base.is_zero()) continue;
              RationalFunction ratio = rb / base;
              if (!ratio.is_polynomial() || ratio.num().degree() > 0 || ratio.is_zero()) continue;
              candidates.push_back({fr, g, ratio.num().coeff(0), "quartic"});
            }
          }
        }
      } else {
        notes.push_back("-a does not split into rational linear factors");
      }
    }
  }

  ProofResult best;
  bool have = false;
  std::vector<std::string> rejected;
  for (const auto& c : candidates) {
    ProofResult r;
    bool usable = false;
    try {
      usable = evaluate(c, ra, rb, options, r);
    } catch (const Error& err) {
      r.diagnostics.push_back(err.what());
    }
    for (const auto& d : r.diagnostics) rejected.push_back(d);
    if (!usable) continue;
    if (!have || static_cast<int>(r.status) < static_cast<int>(best.status)) {
      best = std::move(r);
      have = true;
    }
    if (have && best.status == ProofResult::Status::Proved) break;
  }
  if (have) {
    best.diagnostics.insert(best.diagnostics.begin(), notes.begin(), notes.end());
    return best;
  }

  // nothing usable: report the linear system for g = eta1*n + eta0
  ProofResult out;
  out.status = ProofResult::Status::Failed;
  out.diagnostics = notes;
  for (const auto& d : rejected) out.diagnostics.push_back(d);
  if (auto f = poly_sqrt(neg_a)) {
    out.f = *f;
    std::vector<QPolynomial> cols = residual_columns(*f, rb, 1);
    int top = std::max(cols[0].degree(), cols[1].degree());
    Matrix m;
    for (int k = top; k >= 0; --k) {
      mpq_class c0 = cols[0].coeff(k);
      mpq_class c1 = cols[1].coeff(k);
      if (sgn(c0) == 0 && sgn(c1) == 0) continue;
      out.diagnostics.push_back("n^" + std::to_string(k) + ": " + linear_form(c1, c0) + " = 0");
      m.push_back({c1, c0});
    }
    std::size_t rank = rref(m, 2).size();
    std::string tail = rank == 2 ? ", only g = 0 solves it" : "";
    out.diagnostics.push_back("rank " + std::to_string(rank) + " for g = eta1*n + eta0" + tail);
  }
  return out;
}

}  // namespace cfforge
