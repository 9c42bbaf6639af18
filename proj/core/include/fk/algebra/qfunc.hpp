/**
 * @file qfunc.hpp
 * @brief Exact quantum-algebra primitives: quantum integers, factorials,
 *        finite q-Pochhammer products, Gaussian binomials.
 *
 * Conventions (balanced):
 *   [n]_q = (q^{n/2} - q^{-n/2}) / (q^{1/2} - q^{-1/2})
 *   (y; q)_n = prod_{i=0}^{n-1} (1 - y q^i),  n >= 0
 *
 * Negative Pochhammer lengths are NOT handled here — they become either exact
 * rewrites or truncated geometric expansions at the series layer, where the
 * truncation window is known.
 */
#pragma once

#include "fk/algebra/laurent.hpp"

namespace fk::algebra {

/// [n]_q as a Laurent polynomial in q^{1/2}; odd in n, [0] = 0.
MultiLaurent quantum_integer(std::int64_t n);

/// [n]_q! for n >= 0.
MultiLaurent quantum_factorial(std::int64_t n);

/// (base; q^{step})_n with n >= 0. `base` must be a single signed monomial;
/// step4 is four times the exponent of the Pochhammer step (+4 for q, -4 for
/// q^{-1}).
MultiLaurent pochhammer(const MultiLaurent& base, std::int64_t step4,
                        std::int64_t n);

/// (q; q)_n, n >= 0.
MultiLaurent qq_pochhammer(std::int64_t n);

/// (q^{-1}; q^{-1})_n, n >= 0.
MultiLaurent qinv_pochhammer(std::int64_t n);

/// Gaussian binomial (q;q)_n / ((q;q)_k (q;q)_{n-k}); zero when k outside
/// [0, n].
MultiLaurent gauss_binomial(std::int64_t n, std::int64_t k);

/// Ordinary binomial coefficient as BigInt (n >= 0; zero when k outside).
BigInt binomial_int(std::int64_t n, std::int64_t k);

}  // namespace fk::algebra
