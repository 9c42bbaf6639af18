/**
 * @file halfexp.hpp
 * @brief Half-integer exponents stored as twice their value.
 *
 * Exponents in this engine are integer multiples of a fixed lattice spacing
 * (1/4 for q, 1/2 for x and a; see laurent.hpp). Storing the scaled integer
 * keeps all arithmetic in plain integers with no rounding concerns; the field
 * suffix is the denominator (q4, x2, a2). This helper handles the half-step
 * case used for x-degrees and writhe corrections.
 */
#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "fk/errors.hpp"

namespace fk {

/// A number of the form n/2 with n a 64-bit integer.
struct HalfExp {
  std::int64_t twice = 0;  ///< twice the represented value

  constexpr HalfExp() = default;
  constexpr explicit HalfExp(std::int64_t twice_value) : twice(twice_value) {}

  static constexpr HalfExp from_int(std::int64_t n) { return HalfExp(2 * n); }
  static constexpr HalfExp from_halves(std::int64_t n) { return HalfExp(n); }

  constexpr bool is_integral() const { return twice % 2 == 0; }

  /// Integer value; throws if the value is a strict half-integer.
  std::int64_t to_int() const {
    if (!is_integral())
      raise(ErrorCode::NonIntegralEvaluation,
            "half-integer used where an integer exponent is required");
    return twice / 2;
  }

  friend constexpr HalfExp operator+(HalfExp a, HalfExp b) {
    return HalfExp(a.twice + b.twice);
  }
  friend constexpr HalfExp operator-(HalfExp a, HalfExp b) {
    return HalfExp(a.twice - b.twice);
  }
  constexpr HalfExp operator-() const { return HalfExp(-twice); }
  friend constexpr HalfExp operator*(std::int64_t k, HalfExp a) {
    return HalfExp(k * a.twice);
  }
  constexpr HalfExp& operator+=(HalfExp o) {
    twice += o.twice;
    return *this;
  }
  friend constexpr auto operator<=>(HalfExp, HalfExp) = default;

  /// "3", "-2", "1/2", "-7/2"
  std::string to_string() const {
    if (is_integral()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

}  // namespace fk
