#ifndef HAMLAB_RATIONAL_HPP
#define HAMLAB_RATIONAL_HPP

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "hamlab/error.hpp"

namespace hamlab {

/// Exact rational used for every threshold comparison (i + beta*n, n/2, ...).
using Rational = boost::rational<std::int64_t>;

inline Rational rat(std::int64_t num, std::int64_t den = 1) { return Rational(num, den); }

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

inline std::int64_t floor_of(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline std::int64_t ceil_of(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
  return q;
}

/// Smallest integer q >= 0 with q >= coef * sqrt(x); exact for rational coef, x >= 0.
inline std::int64_t ceil_coef_sqrt(const Rational& coef, const Rational& x) {
  if (coef <= 0 || x <= 0) return 0;
  const Rational target = coef * coef * x;  // compare q^2 >= coef^2 x
  auto q = static_cast<std::int64_t>(std::floor(to_double(coef) * std::sqrt(to_double(x))));
  if (q < 0) q = 0;
  while (q > 0 && Rational(q - 1) * Rational(q - 1) >= target) --q;
  while (Rational(q) * Rational(q) < target) ++q;
  return q;
}

/// Exact test of `value <= coef * sqrt(x)` for value, coef, x >= 0.
inline bool le_coef_sqrt(const Rational& value, const Rational& coef, const Rational& x) {
  if (value <= 0) return true;
  if (coef <= 0 || x <= 0) return false;
  return value * value <= coef * coef * x;
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "3", "-2", "1/4" or a terminating decimal such as "0.25" exactly.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&]() -> Rational {
    fail(ErrorKind::parameter, "not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) return bad();
  try {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      std::size_t used = 0;
      const std::string num(text.substr(0, slash));
      const std::string den(text.substr(slash + 1));
      const std::int64_t n = std::stoll(num, &used);
      if (used != num.size()) return bad();
      const std::int64_t d = std::stoll(den, &used);
      if (used != den.size() || d == 0) return bad();
      return Rational(n, d);
    }
    bool negative = false;
    std::string_view body = text;
    if (body.front() == '-' || body.front() == '+') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_point = false;
    bool seen_digit = false;
    for (char c : body) {
      if (c == '.') {
        if (seen_point) return bad();
        seen_point = true;
        continue;
      }
      if (c < '0' || c > '9') return bad();
      seen_digit = true;
      if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) return bad();
      num = num * 10 + (c - '0');
      if (seen_point) den *= 10;
    }
    if (!seen_digit) return bad();
    return Rational(negative ? -num : num, den);
  } catch (const std::logic_error&) {
    return bad();
  }
}

}  // namespace hamlab

#endif  // HAMLAB_RATIONAL_HPP
