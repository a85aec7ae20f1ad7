#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include <string>

namespace cantor {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  return Rational(num, den);
}

inline BigInt numerator(const Rational& q) {
  return boost::multiprecision::numerator(q);
}

inline BigInt denominator(const Rational& q) {
  return boost::multiprecision::denominator(q);
}

/// "num/den", or just "num" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1)
    return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Exact rationals travel as decimal string pairs.
inline nlohmann::json rational_to_json(const Rational& q) {
  return nlohmann::json{{"num", numerator(q).str()},
                        {"den", denominator(q).str()}};
}

inline Rational rational_from_json(const nlohmann::json& j) {
  return Rational(BigInt(j.at("num").get<std::string>()),
                  BigInt(j.at("den").get<std::string>()));
}

/// 1 / 2^m
inline Rational inverse_power_of_two(unsigned m) {
  BigInt den = 1;
  den <<= m;
  return Rational(BigInt(1), den);
}

} // namespace cantor
