/**
 * @file bigint.hpp
 * @brief Arbitrary-precision integer coefficients (GMP).
 *
 * All series coefficients in the engine are exact integers; they grow fast
 * (q-multinomials over many crossings), so fixed-width types are not an
 * option anywhere coefficients are accumulated.
 */
#pragma once

#include <gmpxx.h>

#include <string>

namespace fk {

using BigInt = mpz_class;

inline std::string to_string(const BigInt& v) { return v.get_str(); }

/// True if |v| == 1; normalisation divides only by unit coefficients.
inline bool is_unit(const BigInt& v) { return v == 1 || v == -1; }

}  // namespace fk
