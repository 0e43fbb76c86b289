#pragma once

#include "cfforge/bigfloat.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cfforge::cli {

struct Fixture {
  std::string id;
  std::string f;
  std::string g;
  std::optional<std::string> closed_form;
  std::vector<std::string> tags;
};

/// Reads a JSON array of fixtures. Throws std::runtime_error on I/O or
/// format problems (missing fields, duplicate ids).
std::vector<Fixture> load_corpus(const std::string& path);

struct BatchOptions {
  int digits = 50;
  long max_terms = 1L << 20;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct Report {
  std::string id;
  std::string status;  // proved_symbolic, verified_numeric, mismatch, unsupported, error
  std::optional<std::string> series_value;
  std::optional<std::string> cf_value;
  std::optional<std::string> closed_form_given;
  std::optional<std::string> closed_form_derived;
  std::optional<std::string> abs_err;
  long n_terms = 0;
  Bits precision_bits = 0;
  std::optional<std::string> message;
  std::map<std::string, double> timings_ms;
};

Report evaluate_fixture(const Fixture& fx, const BatchOptions& options);
/// Reports in fixture order, computed on a thread pool.
std::vector<Report> run_batch(const std::vector<Fixture>& fixtures, const BatchOptions& options);
/// One JSON object on a single line; timings appear only when asked for.
std::string report_json(const Report& r, bool with_timings);

/// Default precision in decimal digits: CF_FORGE_PRECISION when set, else 50.
int default_digits();

/// Entry point; returns the process exit code (0 pass, 1 mismatch or
/// failure, 2 usage or I/O error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfforge::cli
