// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.

#include "support.hpp"

#include "cfforge/cfengine.hpp"
#include "cfforge/cli.hpp"
#include "cfforge/errors.hpp"
#include "cfforge/mpval.hpp"
#include "cfforge/recognizer.hpp"
#include "cfforge/solver.hpp"
#include "cfforge/telescope.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace cfforge;
using testing_support::close;
using testing_support::close_digits;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && s > limit_s) o.fail("took " + std::to_string(s) + " s, limit " + std::to_string(limit_s) + " s");
  if (!o.ok) ++failures;
  std::printf("%s %d %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", id, name, s, o.ok ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
}

mpq_class fv(const Expr& e, long n) { return *eval_rational(e, mpq_class(n)); }

ClosedForm make(std::initializer_list<std::pair<Atom, mpq_class>> terms) {
  ClosedForm cf;
  for (const auto& [a, c] : terms) cf.add(a, c);
  return cf;
}

}  // namespace

int main() {
  auto all = testing_support::bundled();
  const Bits bits50 = digits_to_bits(50);

  criterion(1, "exact identities for 10 specs, n <= 50", 10, [&](Outcome& o) {
    const std::vector<std::pair<std::string, std::string>> specs = {
        {"n^2", "n+1"},      {"n^3", "n+1"},           {"n^4", "2*n+1"},        {"n^7", "n+1"},
        {"n^4/(n+2)", "n+3"}, {"n^5*(n+1)", "n+1"},    {"n*(2*n+1)", "n+1"},    {"n*(3*n+1)", "n+1"},
        {"-2*n", "(n+2)^10"}, {"n^6/(n+2)", "(n+1)/(n^2+1)"}};
    for (const auto& [fs, gs] : specs) {
      CFSpec s = CFSpec::parse(fs, gs);
      Expr f = parse(fs), g = parse(gs);
      mpq_class g0 = fv(g, 0);
      mpq_class sum = 0, prod = 1, Fn = fv(f, 1);
      for (long n = 0; n <= 50; ++n) {
        sum += g0 * g0 / (fv(f, n + 1) * fv(g, n) * fv(g, n + 1));
        if (n >= 1) {
          prod *= fv(f, n) * fv(f, n);
          Fn *= fv(f, n + 1);
        }
        auto c = iterate_exact(s, n);
        if (c.q / c.p != partial_sum(s, n) || c.q / c.p != sum) o.fail(fs + ": q/p != partial sum at n=" + std::to_string(n));
        if (n >= 1 && c.q * c.p_prev - c.q_prev * c.p != prod) o.fail(fs + ": determinant at n=" + std::to_string(n));
        if (c.p * g0 != Fn * fv(g, n + 1)) o.fail(fs + ": p_n g(0) != F_n g(n+1) at n=" + std::to_string(n));
      }
    }
  });

  criterion(2, "{v^4, 2v+1}: 8 - 4 zeta(2) - zeta(4), series within 1e-40", 30, [&](Outcome& o) {
    CFSpec s = CFSpec::parse("v^4", "2*v+1");
    ClosedForm cf = closed_form_for(s);
    ClosedForm expected = make({{Atom::one(), 8}, {Atom::zeta(2), -4}, {Atom::zeta(4), -1}});
    if (!(cf == expected)) o.fail("closed form " + render_closed_form(cf));
    SeriesResult r = sum_series(s, bits50);
    BigFloat printed = eval_float(parse("8-2*pi^2/3-pi^4/90"), bits50 + 64);
    if (!close_digits(r.value, printed, 40)) o.fail("series " + r.value.to_string(50));
    if (!close_digits(eval_closed_form(cf, bits50), printed, 40)) o.fail("closed form value");
    // double-precision oracle for the printed value
    const double pd = 3.14159265358979323846;
    double approx = 8 - 2 * pd * pd / 3 - pd * pd * pd * pd / 90;
    if (std::abs(r.value.to_double() - approx) > 1e-12) o.fail("value " + r.value.to_string(20));
  });

  criterion(3, "polynomial triples: exact ClosedForm equality", 0, [&](Outcome& o) {
    struct Case {
      const char* f;
      ClosedForm expected;
    };
    std::vector<Case> cases = {
        {"v^2", make({{Atom::zeta(3), 1}, {Atom::zeta(2), -1}, {Atom::one(), 1}})},
        {"v^3", make({{Atom::zeta(4), 1}, {Atom::zeta(3), -1}, {Atom::zeta(2), 1}, {Atom::one(), -1}})},
        {"v^7", make({{Atom::zeta(8), 1}, {Atom::zeta(7), -1}, {Atom::zeta(6), 1}, {Atom::zeta(5), -1},
                      {Atom::zeta(4), 1}, {Atom::zeta(3), -1}, {Atom::zeta(2), 1}, {Atom::one(), -1}})},
        {"v*(2*v+1)", make({{Atom::zeta(2), 1}, {Atom::one(), -7}, {Atom::log_prime(2), 8}})},
    };
    for (const auto& c : cases) {
      ClosedForm got = closed_form_for(CFSpec::parse(c.f, "v+1"));
      if (!(got == c.expected)) o.fail(std::string(c.f) + ": " + render_closed_form(got));
    }
  });

  criterion(4, "reverse proof of a=-n^8, b=n^4+(n+1)^4+2(n^2+(n+1)^2)", 0, [&](Outcome& o) {
    std::ostringstream out, err;
    int code = cli::run({"cfforge", "prove", "--a", "-n^8", "--b", "n^4+(n+1)^4+2*(n^2+(n+1)^2)"}, out, err);
    auto j = nlohmann::json::parse(out.str());
    if (code != 0) o.fail("exit " + std::to_string(code));
    if (j["g"] != "2*n+1") o.fail("g = " + j["g"].dump());
    if (j["residual"] != "0") o.fail("residual = " + j["residual"].dump());
    // {eta1, eta0} = {2, 1}
    auto sols = solve_g(*as_rational_function(parse("n^4")), *as_rational_function(parse("n^4+(n+1)^4+2*(n^2+(n+1)^2)")), 6);
    if (sols.size() != 1 || sols[0].coeff(1) != 2 || sols[0].coeff(0) != 1) o.fail("solve_g");
  });

  criterion(5, "{e^(-2v-8) v^3, e^v}: series = e^9 zeta(3) within 1e-40", 0, [&](Outcome& o) {
    CFSpec s = CFSpec::parse("exp(-2*v-8)*v^3", "exp(v)");
    SeriesResult r = sum_series(s, bits50);
    BigFloat expected = mpval::const_e(bits50 + 64);
    BigFloat e9 = expected;
    for (int i = 1; i < 9; ++i) e9 *= expected;
    expected = e9 * mpval::zeta_int(3, bits50 + 64);
    if (!close_digits(r.value, expected, 40)) o.fail("series " + r.value.to_string(50));
  });

  criterion(6, "{v(v^2+2), v+2}: numeric within 1e-30, symbolic unsupported", 0, [&](Outcome& o) {
    const auto& fx = testing_support::fixture(all, "v(v2+2)_v+2");
    cli::BatchOptions opt;
    cli::Report r = cli::evaluate_fixture(fx, opt);
    if (r.status != "verified_numeric") o.fail("status " + r.status);
    CFSpec s = CFSpec::parse(fx.f, fx.g);
    SeriesResult sr = sum_series(s, bits50);
    BigFloat printed = eval_float(parse("1-pi*coth(sqrt(2)*pi)/(3*sqrt(2))"), bits50 + 64);
    if (!close_digits(sr.value, printed, 30)) o.fail("series " + sr.value.to_string(40));
    bool unsupported = false;
    try {
      closed_form_for(s);
    } catch (const Unsupported&) {
      unsupported = true;
    }
    if (!unsupported) o.fail("symbolic path did not report unsupported");
  });

  criterion(7, "PSLQ relation (90, -720, 60, 1) and recognize round trips", 0, [&](Outcome& o) {
    Bits bits = bits50;
    SeriesResult r = sum_series(CFSpec::parse("v^4", "2*v+1"), bits);
    BigFloat pi = mpval::const_pi(bits);
    BigFloat pi2 = pi * pi;
    auto rel = pslq({r.value, BigFloat(1, bits), pi2, pi2 * pi2}, bits);
    if (!rel) {
      o.fail("no relation");
    } else {
      std::vector<mpz_class> want = {90, -720, 60, 1};
      if (rel->coefficients != want) o.fail("relation differs");
      BigFloat bound = BigFloat(1, bits);
      bound = ldexp(bound, -static_cast<long>(bits / 2));
      if (!(rel->residual < bound)) o.fail("residual too large");
    }
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
      long coeff_bits = 8, den_bits = 0;
      for (const auto& [atom, c] : cf.terms()) {
        mpz_class h = abs(c.get_num()) * c.get_den();
        coeff_bits = std::max<long>(coeff_bits, static_cast<long>(mpz_sizeinbase(h.get_mpz_t(), 2)));
        den_bits += static_cast<long>(mpz_sizeinbase(c.get_den().get_mpz_t(), 2));
      }
      ConstantBasis basis = basis_for(cf);
      int max_coeff = static_cast<int>(coeff_bits + den_bits + 8);
      Bits b = std::max<Bits>(256, static_cast<Bits>((basis.size() + 1) * max_coeff * 2 + 64));
      auto got = recognize([cf](Bits p) { return eval_closed_form(cf, p); }, basis, b, max_coeff);
      if (!got || !(*got == cf)) o.fail("round trip " + fx.id);
      ++checked;
    }
    if (checked < 20) o.fail("only " + std::to_string(checked) + " closed forms");
  });

  criterion(8, "constants at 170 bits agree across two algorithms", 0, [&](Outcome& o) {
    const Bits b = 170;
    auto agree = [&](const char* name, const BigFloat& x, const BigFloat& y) {
      if (!close(x, y, b - 2)) o.fail(name);
    };
    agree("pi", mpval::pi_agm(b), mpval::alt::pi_machin(b));
    agree("gamma", mpval::gamma_brent_mcmillan(b), mpval::alt::gamma_euler_maclaurin(b));
    agree("zeta(3)", mpval::zeta_int(3, b), mpval::alt::zeta3_apery(b));
    agree("catalan", mpval::catalan_ramanujan(b), mpval::alt::catalan_alternating(b));
  });

  criterion(9, "negative controls: perturbed closed form, non-instance", 0, [&](Outcome& o) {
    std::ostringstream out, err;
    int code = cli::run({"cfforge", "verify", "--corpus", testing_support::corpus_path("perturbed.json")}, out, err);
    if (code != 1) o.fail("exit " + std::to_string(code));
    std::istringstream in(out.str());
    bool seen = false;
    for (std::string line; std::getline(in, line);) {
      auto j = nlohmann::json::parse(line);
      if (j["status"] != "mismatch") continue;
      seen = true;
      double e = std::stod(j["abs_err"].get<std::string>());
      if (e < 1e-11 || e > 1e-9) o.fail("abs_err " + j["abs_err"].get<std::string>());
    }
    if (!seen) o.fail("no mismatch reported");
    if (!solve_g(*as_rational_function(parse("n^3")), *as_rational_function(parse("2*n^3+3*n^2+6*n+1")), 6).empty())
      o.fail("solve_g found a g for the non-instance");
  });

  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
