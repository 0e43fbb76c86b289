#include "cfforge/cli.hpp"

#include "cfforge/cfengine.hpp"
#include "cfforge/errors.hpp"
#include "cfforge/expr.hpp"
#include "cfforge/recognizer.hpp"
#include "cfforge/solver.hpp"
#include "cfforge/telescope.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

namespace cfforge::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr ParseOptions kAliases{true};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Digits printed for values: the requested precision.
std::string show(const BigFloat& x, int digits) { return x.to_string(digits); }

std::string show_err(const BigFloat& x) { return x.is_zero() ? "0" : x.to_string(6); }

/// Usage problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Expr parse_arg(const std::string& text, const char* what) {
  try {
    return parse(text, kAliases);
  } catch (const SyntaxError& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::vector<Fixture> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("corpus " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_array()) throw std::runtime_error("corpus " + path + " must be a JSON array");
  std::vector<Fixture> out;
  std::set<std::string> ids;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("id") || !item.contains("f") || !item.contains("g")) {
      throw std::runtime_error("fixture needs id, f and g: " + item.dump());
    }
    Fixture fx;
    fx.id = item.at("id").get<std::string>();
    fx.f = item.at("f").get<std::string>();
    fx.g = item.at("g").get<std::string>();
    if (item.contains("closed_form") && !item.at("closed_form").is_null()) {
      fx.closed_form = item.at("closed_form").get<std::string>();
    }
    if (item.contains("tags")) fx.tags = item.at("tags").get<std::vector<std::string>>();
    if (!ids.insert(fx.id).second) throw std::runtime_error("duplicate fixture id " + fx.id);
    out.push_back(std::move(fx));
  }
  return out;
}

Report evaluate_fixture(const Fixture& fx, const BatchOptions& options) {
  Report r;
  r.id = fx.id;
  r.closed_form_given = fx.closed_form;
  Bits bits = digits_to_bits(options.digits);
  r.precision_bits = bits;
  Stopwatch total;
  try {
    CFSpec spec = CFSpec::parse(fx.f, fx.g);
    SeriesOptions so;
    so.max_terms = options.max_terms;
    int agreement = std::max(1, options.digits - 10);
    BigFloat tol = BigFloat::from_decimal("1e-" + std::to_string(agreement), bits);

    Stopwatch t_series;
    BigFloat series(bits);
    std::optional<VerifyReport> vr;
    if (fx.closed_form) {
      vr = verify_identity(spec, parse(*fx.closed_form, kAliases), bits, agreement, so);
      series = vr->series_value;
      r.cf_value = show(vr->cf_value, options.digits);
      r.abs_err = show_err(vr->abs_err);
      r.n_terms = vr->n_terms;
    } else {
      SeriesResult sr = sum_series(spec, bits, so);
      series = sr.value;
      r.cf_value = show(sr.cf_value, options.digits);
      r.n_terms = sr.n_terms;
    }
    r.series_value = show(series, options.digits);
    r.timings_ms["series"] = t_series.ms();

    Stopwatch t_symbolic;
    std::optional<bool> derived_ok;
    std::string unsupported_reason;
    if (spec.exact()) {
      try {
        ClosedForm cf = closed_form_for(spec);
        r.closed_form_derived = render_closed_form(cf, ClosedForm::Style::Pi);
        derived_ok = abs(eval_closed_form(cf, bits + 128) - series) < tol;
      } catch (const Unsupported& e) {
        unsupported_reason = e.what();
      }
    } else {
      unsupported_reason = "f, g are not rational functions";
    }
    r.timings_ms["symbolic"] = t_symbolic.ms();

    if (derived_ok && !*derived_ok) {
      r.status = "mismatch";
      r.message = "derived closed form disagrees with the series";
    } else if (vr && !vr->verified) {
      r.status = "mismatch";
    } else if (derived_ok) {
      r.status = "proved_symbolic";
    } else if (vr) {
      r.status = "verified_numeric";
      r.message = unsupported_reason;
    } else {
      r.status = "unsupported";
      r.message = unsupported_reason;
    }
  } catch (const std::exception& e) {
    r.status = "error";
    r.message = e.what();
  }
  r.timings_ms["total"] = total.ms();
  return r;
}

std::vector<Report> run_batch(const std::vector<Fixture>& fixtures, const BatchOptions& options) {
  std::vector<Report> out(fixtures.size());
  unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, fixtures.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < fixtures.size(); i = next++) out[i] = evaluate_fixture(fixtures[i], options);
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::string report_json(const Report& r, bool with_timings) {
  json j;
  j["id"] = r.id;
  j["status"] = r.status;
  auto opt = [&](const char* key, const std::optional<std::string>& v) { j[key] = v ? json(*v) : json(nullptr); };
  opt("series_value", r.series_value);
  opt("cf_value", r.cf_value);
  opt("closed_form_given", r.closed_form_given);
  opt("closed_form_derived", r.closed_form_derived);
  opt("abs_err", r.abs_err);
  j["n_terms"] = r.n_terms;
  j["precision_bits"] = r.precision_bits;
  if (r.message) j["message"] = *r.message;
  if (with_timings) {
    json t;
    for (const auto& [k, v] : r.timings_ms) t[k] = v;
    j["timings"] = t;
  }
  return j.dump();
}

int default_digits() {
  const char* env = std::getenv("CF_FORGE_PRECISION");
  if (env == nullptr || *env == '\0') return 50;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 5 || v > 100000) throw UsageError(std::string("CF_FORGE_PRECISION must be an integer >= 5, got ") + env);
  return static_cast<int>(v);
}

namespace {

int cmd_verify(const std::string& corpus, const BatchOptions& options, const std::string& format, bool timings,
               std::ostream& out, std::ostream& err) {
  std::vector<Fixture> fixtures;
  try {
    fixtures = load_corpus(corpus);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  std::vector<Report> reports = run_batch(fixtures, options);
  std::map<std::string, int> counts{{"proved_symbolic", 0}, {"verified_numeric", 0}, {"mismatch", 0},
                                    {"unsupported", 0}, {"error", 0}};
  for (const auto& r : reports) ++counts[r.status];

  json summary;
  summary["total"] = reports.size();
  for (const char* k : {"proved_symbolic", "verified_numeric", "mismatch", "unsupported", "error"}) summary[k] = counts[k];
  if (format == "text") {
    out << std::left << std::setw(34) << "id" << std::setw(18) << "status" << std::setw(12) << "abs_err"
        << "series_value\n";
    for (const auto& r : reports) {
      out << std::setw(34) << r.id << std::setw(18) << r.status << std::setw(12) << r.abs_err.value_or("-")
          << r.series_value.value_or("-").substr(0, 30) << "\n";
      if (r.message && (r.status == "error" || r.status == "mismatch")) out << "    " << *r.message << "\n";
    }
    out << json{{"summary", summary}}.dump() << "\n";
  } else {
    for (const auto& r : reports) out << report_json(r, timings) << "\n";
    err << json{{"summary", summary}}.dump() << "\n";
  }
  return counts["mismatch"] + counts["error"] > 0 ? 1 : 0;
}

std::string to_cli_status(ProofResult::Status s) {
  switch (s) {
    case ProofResult::Status::Proved: return "proved_symbolic";
    case ProofResult::Status::Candidate: return "verified_numeric";
    case ProofResult::Status::Failed: return "failed";
  }
  return "failed";
}

int cmd_prove(const std::string& a_text, const std::string& b_text, int max_degree, int digits, std::ostream& out) {
  Expr a = parse_arg(a_text, "--a");
  Expr b = parse_arg(b_text, "--b");
  ProveOptions opt;
  opt.max_degree = max_degree;
  opt.bits = digits_to_bits(digits);
  ProofResult pr = prove(a, b, opt);

  json j;
  j["status"] = to_cli_status(pr.status);
  j["a"] = render(a);
  j["b"] = render(b);
  if (pr.status != ProofResult::Status::Failed || !pr.g.is_zero()) {
    j["f"] = pr.f.render();
    j["g"] = pr.g.is_zero() ? json(nullptr) : json(pr.g.render());
  }
  if (!pr.g.is_zero()) {
    j["route"] = pr.route;
    if (pr.route == "quartic") j["scale"] = pr.scale.get_str();
    auto ra = as_rational_function(a);
    auto rb = as_rational_function(b);
    if (pr.route == "square" && ra && rb) j["residual"] = functional_residual(pr.f, *rb, pr.g).render();
    j["offset"] = pr.offset.get_str();
    j["multiplier"] = pr.multiplier.get_str();
  }
  if (pr.closed_form) {
    j["closed_form"] = render_closed_form(*pr.closed_form, ClosedForm::Style::Pi);
    j["closed_form_zeta"] = render_closed_form(*pr.closed_form, ClosedForm::Style::Zeta);
  }
  if (pr.value) j["value"] = show(*pr.value, digits);
  if (pr.direct_value) j["direct_value"] = show(*pr.direct_value, 20);
  j["checks"] = {{"b0_consistent", pr.checks.b0_consistent},
                 {"f0_zero", pr.checks.f0_zero},
                 {"functional_identity_verified_degree", pr.checks.functional_identity_verified_degree}};
  j["precision_bits"] = opt.bits;
  j["diagnostics"] = pr.diagnostics;
  out << j.dump() << "\n";
  return pr.status == ProofResult::Status::Failed ? 1 : 0;
}

int cmd_recognize(const std::optional<std::string>& value, const std::optional<std::string>& f,
                  const std::optional<std::string>& g, int level, int digits, std::ostream& out) {
  Bits bits = std::max<Bits>(128, digits_to_bits(digits));
  ValueSource source;
  json j;
  if (value) {
    Expr e = parse_arg(*value, "--value");
    if (contains_var(e)) throw UsageError("--value must be a constant expression");
    source = [e](Bits b) { return eval_float(e, b); };
    j["value_expr"] = render(e);
  } else {
    Expr fe = parse_arg(*f, "--f");
    Expr ge = parse_arg(*g, "--g");
    auto spec = std::make_shared<CFSpec>(CFSpec::create(fe, ge));
    source = [spec](Bits b) { return sum_series(*spec, b).value; };
    j["f"] = render(fe);
    j["g"] = render(ge);
  }
  ConstantBasis basis = default_basis(level);
  j["basis_level"] = level;
  j["value"] = show(source(bits), digits);
  auto cf = recognize(source, basis, bits);
  if (cf) {
    j["status"] = "recognized";
    j["closed_form"] = render_closed_form(*cf, ClosedForm::Style::Zeta);
    j["closed_form_pi"] = render_closed_form(*cf, ClosedForm::Style::Pi);
  } else {
    j["status"] = "unsupported";
    j["message"] = "no relation over basis level " + std::to_string(level);
  }
  j["precision_bits"] = bits;
  out << j.dump() << "\n";
  return 0;
}

int cmd_sum(const std::string& f, const std::string& g, int digits, long max_terms, std::ostream& out) {
  Expr fe = parse_arg(f, "--f");
  Expr ge = parse_arg(g, "--g");
  CFSpec spec = CFSpec::create(fe, ge);
  Bits bits = digits_to_bits(digits);
  SeriesOptions so;
  so.max_terms = max_terms;
  SeriesResult sr = sum_series(spec, bits, so);
  json j;
  j["f"] = render(fe);
  j["g"] = render(ge);
  j["series_value"] = show(sr.value, digits);
  j["cf_value"] = show(sr.cf_value, digits);
  j["error_estimate"] = show_err(sr.error_estimate);
  j["method"] = sr.method;
  j["n_terms"] = sr.n_terms;
  if (spec.exact()) {
    try {
      ClosedForm cf = closed_form_for(spec);
      j["closed_form"] = render_closed_form(cf, ClosedForm::Style::Pi);
    } catch (const Unsupported&) {
      j["closed_form"] = nullptr;
    }
  }
  j["precision_bits"] = bits;
  out << j.dump() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continued fractions from pairs (f, g): verify, prove, recognize, sum", "cfforge"};
  app.require_subcommand(1);

  int digits = 0;
  long max_terms = 1L << 20;
  std::string corpus;
  std::string format = "json";
  unsigned jobs = 0;
  bool timings = false;
  std::string a_text;
  std::string b_text;
  int max_degree = 6;
  std::optional<std::string> value;
  std::optional<std::string> f_text;
  std::optional<std::string> g_text;
  std::string sum_f;
  std::string sum_g;
  int level = 1;

  auto* verify = app.add_subcommand("verify", "Check every fixture of a corpus");
  verify->add_option("--corpus", corpus, "JSON fixture file")->required();
  verify->add_option("--precision", digits, "Decimal digits")->check(CLI::Range(5, 100000));
  verify->add_option("--terms", max_terms, "Term budget")->check(CLI::PositiveNumber);
  verify->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--jobs", jobs, "Worker threads (0: all cores)");
  verify->add_flag("--timings", timings, "Add a timings block to each report");

  auto* prove_cmd = app.add_subcommand("prove", "Recover f, g from a_n, b_n and sum the fraction");
  prove_cmd->add_option("--a", a_text, "Partial numerators a_n")->required();
  prove_cmd->add_option("--b", b_text, "Partial denominators b_n")->required();
  prove_cmd->add_option("--max-degree", max_degree, "Largest degree tried for g")->check(CLI::Range(0, 64));
  prove_cmd->add_option("--precision", digits, "Decimal digits")->check(CLI::Range(5, 100000));

  auto* rec = app.add_subcommand("recognize", "Find a closed form by integer relation detection");
  auto* opt_value = rec->add_option("--value", value, "Constant expression");
  auto* opt_f = rec->add_option("--f", f_text, "f(n)");
  auto* opt_g = rec->add_option("--g", g_text, "g(n)");
  opt_value->excludes(opt_f)->excludes(opt_g);
  opt_f->needs(opt_g);
  opt_g->needs(opt_f);
  rec->add_option("--basis", level, "Basis level")->check(CLI::Range(1, 3));
  rec->add_option("--precision", digits, "Decimal digits")->check(CLI::Range(5, 100000));

  auto* sum = app.add_subcommand("sum", "Sum the series of a pair (f, g)");
  sum->add_option("--f", sum_f, "f(n)")->required();
  sum->add_option("--g", sum_g, "g(n)")->required();
  sum->add_option("--precision", digits, "Decimal digits")->check(CLI::Range(5, 100000));
  sum->add_option("--terms", max_terms, "Term budget")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store = args.empty() ? std::vector<std::string>{"cfforge"} : args;
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (digits == 0) digits = default_digits();
    if (verify->parsed()) {
      BatchOptions options;
      options.digits = digits;
      options.max_terms = max_terms;
      options.jobs = jobs;
      return cmd_verify(corpus, options, format, timings, out, err);
    }
    if (prove_cmd->parsed()) return cmd_prove(a_text, b_text, max_degree, digits, out);
    if (rec->parsed()) {
      if (!value && !f_text) throw UsageError("recognize needs --value or --f/--g");
      return cmd_recognize(value, f_text, g_text, level, digits, out);
    }
    if (sum->parsed()) return cmd_sum(sum_f, sum_g, digits, max_terms, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidSpec& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cfforge::cli
