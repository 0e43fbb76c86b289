#include "cfforge/bigfloat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cfforge {

namespace {

Bits wider(const BigFloat& a, const BigFloat& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

BigFloat::BigFloat(Bits bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(long value, Bits bits) {
  mpfr_init2(value_, bits);
  mpfr_set_si(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(const mpz_class& value, Bits bits) {
  mpfr_init2(value_, bits);
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const mpq_class& value, Bits bits) {
  mpfr_init2(value_, bits);
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::from_decimal(const std::string& text, Bits bits) {
  BigFloat out(bits);
  if (mpfr_set_str(out.value_, text.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("not a decimal number: " + text);
  }
  return out;
}

BigFloat BigFloat::pow2(long exponent, Bits bits) {
  BigFloat out(1, bits);
  mpfr_mul_2si(out.value_, out.value_, exponent, MPFR_RNDN);
  return out;
}

BigFloat BigFloat::rounded(Bits bits) const {
  BigFloat out(bits);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

mpz_class BigFloat::round_to_integer() const {
  mpz_class out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDN);
  return out;
}

double BigFloat::log2_abs() const {
  if (is_zero()) return -INFINITY;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, value_, MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

std::string BigFloat::to_string(int digits) const {
  if (!is_finite()) {
    if (mpfr_nan_p(value_)) return "nan";
    return sign() < 0 ? "-inf" : "inf";
  }
  if (is_zero()) return "0";
  digits = std::max(digits, 1);
  mpfr_exp_t exp10 = 0;
  char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(digits), value_, MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);
  bool negative = !mant.empty() && mant[0] == '-';
  if (negative) mant.erase(0, 1);
  // value = 0.mant * 10^exp10
  std::string out = negative ? "-" : "";
  if (exp10 > 0 && exp10 <= 40) {
    auto e = static_cast<std::size_t>(exp10);
    if (mant.size() <= e) {
      out += mant + std::string(e - mant.size(), '0');
    } else {
      out += mant.substr(0, e) + "." + mant.substr(e);
    }
  } else if (exp10 <= 0 && exp10 > -8) {
    out += "0." + std::string(static_cast<std::size_t>(-exp10), '0') + mant;
  } else {
    out += mant.substr(0, 1);
    if (mant.size() > 1) out += "." + mant.substr(1);
    out += "e" + std::to_string(static_cast<long>(exp10) - 1);
  }
  return out;
}

BigFloat BigFloat::operator-() const {
  BigFloat out(precision());
  mpfr_neg(out.value_, value_, MPFR_RNDN);
  return out;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) { return *this = *this + rhs; }
BigFloat& BigFloat::operator-=(const BigFloat& rhs) { return *this = *this - rhs; }
BigFloat& BigFloat::operator*=(const BigFloat& rhs) { return *this = *this * rhs; }
BigFloat& BigFloat::operator/=(const BigFloat& rhs) { return *this = *this / rhs; }

BigFloat& BigFloat::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat out(wider(a, b));
  mpfr_add(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat out(wider(a, b));
  mpfr_sub(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat out(wider(a, b));
  mpfr_mul(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  BigFloat out(wider(a, b));
  mpfr_div(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

BigFloat operator*(const BigFloat& a, long b) {
  BigFloat out(a.precision());
  mpfr_mul_si(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

BigFloat operator/(const BigFloat& a, long b) {
  BigFloat out(a.precision());
  mpfr_div_si(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

BigFloat operator+(const BigFloat& a, long b) {
  BigFloat out(a.precision());
  mpfr_add_si(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

BigFloat operator-(const BigFloat& a, long b) {
  BigFloat out(a.precision());
  mpfr_sub_si(out.value_, a.value_, b, MPFR_RNDN);
  return out;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigFloat abs(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_abs(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat sqrt(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_sqrt(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat pow(const BigFloat& x, long k) {
  BigFloat out(x.precision());
  mpfr_pow_si(out.get(), x.get(), k, MPFR_RNDN);
  return out;
}

BigFloat ldexp(const BigFloat& x, long k) {
  BigFloat out(x.precision());
  mpfr_mul_2si(out.get(), x.get(), k, MPFR_RNDN);
  return out;
}

const BigFloat& max_abs(const BigFloat& a, const BigFloat& b) {
  return mpfr_cmpabs(a.get(), b.get()) >= 0 ? a : b;
}

Bits digits_to_bits(int digits) {
  return static_cast<Bits>(std::ceil(static_cast<double>(digits) * 3.3219280948873623));
}

}  // namespace cfforge
