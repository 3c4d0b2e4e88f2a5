#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <stdexcept>
#include <string>

namespace carnot {

// Exact rational scalar used by every algebraic module. Only the numeric
// path-lifting module works in floating point.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(num, den);
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Serialized as "p" or "p/q" with q > 0.
inline std::string rational_to_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline std::optional<Rational> rational_from_string(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto parse_int = [](const std::string& t) -> std::optional<BigInt> {
    if (t.empty()) return std::nullopt;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return std::nullopt;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return std::nullopt;
    return BigInt(t);
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    auto n = parse_int(s);
    if (!n) return std::nullopt;
    return Rational(*n);
  }
  auto n = parse_int(s.substr(0, slash));
  auto d = parse_int(s.substr(slash + 1));
  if (!n || !d || *d == 0) return std::nullopt;
  return Rational(*n, *d);
}

// Error codes surfaced through the library API.
enum class ErrorCode {
  DimensionMismatch,
  AlgebraMismatch,
  InvalidArgument,
  NotClosed,
  GradingIncompatible,
  NotStratified,
  NotHomomorphism,
  NoSolution,
  NotContact,
  NotSimplyConnected,
  NotHorizontal,
  NotClosedCurve,
  BasepointMismatch,
  InconsistentHolonomy,
  StepTooHigh,
  ParseError,
  UnsupportedExpression,
  SingularPoint,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace carnot
