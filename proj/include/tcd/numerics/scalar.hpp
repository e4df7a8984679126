#pragma once

// Working-precision policy. Every numerical routine in the library is a
// template over a `Real` scalar; three levels are instantiated by the tools:
// IEEE double, x87 80-bit long double (~19 digits) and software-emulated
// binary128 (~34 digits).

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <concepts>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <string_view>

namespace tcd {

using extended = boost::multiprecision::float128;

template <class T>
concept Real = std::floating_point<T> || std::same_as<T, extended>;

enum class Precision { standard, long_double, extended };

inline std::string_view to_string(Precision p) {
  switch (p) {
  case Precision::standard:
    return "double";
  case Precision::long_double:
    return "long";
  default:
    return "extended";
  }
}

inline Precision parse_precision(std::string_view s) {
  if (s == "double" || s == "standard")
    return Precision::standard;
  if (s == "long")
    return Precision::long_double;
  if (s == "extended")
    return Precision::extended;
  throw std::invalid_argument("unknown precision '" + std::string(s) + "'");
}

/// Scalar used for sparse factorizations: double for the wider types, whose
/// eigenpairs are then recovered by residual correction in full precision.
template <class T>
using factor_scalar_t = std::conditional_t<(std::numeric_limits<T>::digits > 53), double, T>;

template <Real T> inline T pi() { return boost::math::constants::pi<T>(); }

/// Unit roundoff of the working precision.
template <Real T> inline T ulp() { return std::numeric_limits<T>::epsilon(); }

template <Real T> inline int digits10() { return std::numeric_limits<T>::digits10; }

template <Real T> inline bool is_finite(const T &x) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(x);
}

/// Shortest round-trip decimal representation at the working precision.
template <Real T> std::string format(const T &x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<T>::max_digits10);
  os << x;
  return os.str();
}

/// Parses a decimal literal without passing through double first.
template <Real T> T parse(std::string_view text) {
  if constexpr (std::same_as<T, extended>) {
    return extended(std::string(text));
  } else {
    std::string buf(text);
    std::size_t used = 0;
    T v{};
    if constexpr (std::same_as<T, double>)
      v = std::stod(buf, &used);
    else if constexpr (std::same_as<T, float>)
      v = std::stof(buf, &used);
    else
      v = std::stold(buf, &used);
    if (used != buf.size())
      throw std::invalid_argument("not a number: '" + buf + "'");
    return v;
  }
}

} // namespace tcd
