/**
 * @file parse.hpp
 * @brief Parser for the canonical polynomial string format.
 *
 * Accepts everything MultiLaurent::to_string emits, plus parentheses,
 * implicit multiplication and exact division so bundled fixture tables can be
 * transcribed near-literally:
 *
 *   "1 - q + 2*q^2 - q^{7/2}*x"
 *   "q*(1 + 6*q + q^2)"
 *   "(1 - q^3)/(1 - q)"          (division must be exact)
 *   "q(2 + 3q + 11q^2 + 3q^3 + 2q^4)"   (implicit multiplication)
 *
 * Variables: q, x, a; "t" is accepted as an alias for x (Alexander tables).
 * Exponents: plain integers, or braces for negatives/halves: ^{-1}, ^{3/2}.
 */
#pragma once

#include <string>

#include "fk/algebra/laurent.hpp"

namespace fk::algebra {

/// Parse the canonical polynomial format; throws Error(Validation) on
/// malformed input and Error(NonIntegralEvaluation) on inexact division.
MultiLaurent parse_poly(const std::string& text);

}  // namespace fk::algebra
