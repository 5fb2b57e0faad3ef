#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ggame {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct BudgetError : Error {
  using Error::Error;
};

inline Rational make_rational(long long num, long long den) {
  if (den == 0) throw Error("rational with zero denominator");
  return Rational(Integer(num), Integer(den));
}

/// Parses "p/q" or a bare integer "p". Denominators must be nonzero.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&](const char* why) {
    throw ParseError("bad rational \"" + std::string(text) + "\": " + why);
  };
  if (text.empty()) bad("empty");
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(Integer(std::string(text)));
    }
    Integer num{std::string(text.substr(0, slash))};
    Integer den{std::string(text.substr(slash + 1))};
    if (den == 0) bad("zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    bad("not an integer ratio");
  }
  return Rational();  // unreachable
}

/// Canonical form: "p" when the denominator is 1, otherwise "p/q".
inline std::string format_rational(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += '/';
    s += denominator(r).str();
  }
  return s;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ggame
