#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tracemob {

using Rational = mpq_class;

// Absolute tolerance used whenever computations run in floating point.
inline constexpr double kFloatTolerance = 1e-9;

enum class NumericMode { exact, floating };

template <typename T>
struct NumericTraits;

template <>
struct NumericTraits<double> {
  static constexpr NumericMode mode = NumericMode::floating;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x, double scale = 1.0) {
    return std::abs(x) <= kFloatTolerance * std::max(1.0, scale);
  }
  static bool is_positive(double x) { return x > kFloatTolerance; }
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::abs(x); }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static std::string format(double x);
};

template <>
struct NumericTraits<Rational> {
  static constexpr NumericMode mode = NumericMode::exact;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x, double /*scale*/ = 1.0) { return sgn(x) == 0; }
  static bool is_positive(const Rational& x) { return sgn(x) > 0; }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static Rational from_rational(const Rational& q) { return q; }
  static std::string format(const Rational& x);
};

template <typename T>
concept Scalar = requires { NumericTraits<T>::mode; };

template <Scalar T>
bool nearly_equal(const T& a, const T& b, double scale = 1.0) {
  return NumericTraits<T>::is_zero(T(a - b), scale);
}

template <Scalar T>
T power(const T& base, std::size_t exponent) {
  T result = NumericTraits<T>::one();
  for (std::size_t i = 0; i < exponent; ++i) result *= base;
  return result;
}

// Parses "3/5", "-2", "0.6" or "1e-3" into an exact rational. Decimal
// notation is converted exactly (0.6 becomes 3/5). Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Formats a double with 9 significant digits.
std::string format_double(double x);

}  // namespace tracemob
