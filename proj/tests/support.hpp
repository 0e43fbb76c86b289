#pragma once

#include "cfforge/bigfloat.hpp"
#include "cfforge/cli.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing_support {

/// |a - b| < 2^-bits
inline bool close(const cfforge::BigFloat& a, const cfforge::BigFloat& b, long bits) {
  cfforge::BigFloat d = abs(a - b);
  return d.is_zero() || d.log2_abs() < static_cast<double>(-bits);
}

/// |a - b| < 10^-digits
inline bool close_digits(const cfforge::BigFloat& a, const cfforge::BigFloat& b, int digits) {
  cfforge::Bits bits = std::max(a.precision(), b.precision());
  return abs(a - b) < cfforge::BigFloat::from_decimal("1e-" + std::to_string(digits), bits);
}

inline std::string corpus_path(const std::string& name) { return std::string(CFFORGE_SOURCE_DIR) + "/corpus/" + name; }

inline std::vector<cfforge::cli::Fixture> bundled() { return cfforge::cli::load_corpus(corpus_path("bundled.json")); }

inline const cfforge::cli::Fixture& fixture(const std::vector<cfforge::cli::Fixture>& all, const std::string& id) {
  for (const auto& f : all) {
    if (f.id == id) return f;
  }
  throw std::runtime_error("no fixture " + id);
}

}  // namespace testing_support
