/**
 * @file laurent.hpp
 * @brief Sparse exact Laurent polynomials in q^{1/4}, x^{1/2}, a^{1/2}.
 *
 * This is the coefficient workhorse of the engine. Exponents are stored as
 * integer multiples of the variable's lattice spacing, so the monomial
 * lattice is Z^3 and all arithmetic is exact integer arithmetic on GMP
 * coefficients. The spacing is 1/4 for q (crossing elements above rank two
 * genuinely carry quarter powers of q) and 1/2 for x and a; the field suffix
 * is the denominator (q4 = four times the q-exponent, x2/a2 = twice the x/a
 * exponent).
 *
 * Canonical term order everywhere (storage, rendering, JSON): ascending
 * lexicographic by (x2, q4, a2). Rendering a polynomial therefore lists terms
 * by x-power first, then q-power, which is the order the verification tables
 * are written in.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fk/bigint.hpp"
#include "fk/errors.hpp"
#include "fk/halfexp.hpp"

namespace fk::algebra {

/// Exponent vector of one monomial; q4 is four times the q-exponent, x2 and
/// a2 are twice the x- and a-exponents.
struct Monomial {
  std::int64_t q4 = 0;
  std::int64_t x2 = 0;
  std::int64_t a2 = 0;

  friend constexpr bool operator==(const Monomial&, const Monomial&) = default;

  /// Canonical order: by x-power, then q-power, then a-power.
  friend constexpr bool operator<(const Monomial& l, const Monomial& r) {
    if (l.x2 != r.x2) return l.x2 < r.x2;
    if (l.q4 != r.q4) return l.q4 < r.q4;
    return l.a2 < r.a2;
  }

  constexpr Monomial operator+(const Monomial& o) const {
    return {q4 + o.q4, x2 + o.x2, a2 + o.a2};
  }
  constexpr Monomial operator-(const Monomial& o) const {
    return {q4 - o.q4, x2 - o.x2, a2 - o.a2};
  }
};

/// q to the power q4/4 as a monomial.
constexpr Monomial q_power4(std::int64_t q4) { return Monomial{q4, 0, 0}; }
constexpr Monomial x_power2(std::int64_t x2) { return Monomial{0, x2, 0}; }

/**
 * @brief Exact sparse Laurent polynomial with BigInt coefficients.
 *
 * Invariants: terms sorted in canonical monomial order, no zero coefficients.
 */
class MultiLaurent {
 public:
  using Term = std::pair<Monomial, BigInt>;

  MultiLaurent() = default;

  static MultiLaurent zero() { return MultiLaurent(); }
  static MultiLaurent one() { return monomial(1, Monomial{}); }
  static MultiLaurent integer(BigInt c);
  static MultiLaurent monomial(BigInt c, Monomial m);
  /// Build from arbitrary (possibly unsorted / duplicated) terms.
  static MultiLaurent from_terms(std::vector<Term> terms);
  /// Build from terms already in strictly ascending canonical order with no
  /// zero coefficients; skips the canonicalisation pass.
  static MultiLaurent from_canonical_terms(std::vector<Term> terms);

  bool is_zero() const { return t_.empty(); }
  bool is_one() const;
  bool is_monomial() const { return t_.size() == 1; }
  std::size_t term_count() const { return t_.size(); }
  const std::vector<Term>& terms() const { return t_; }

  /// Smallest / largest term in canonical order; polynomial must be nonzero.
  const Term& trailing() const;
  const Term& leading() const;

  /// Extremal scaled exponents over all terms (nullopt when zero).
  std::optional<std::int64_t> min_x2() const;
  std::optional<std::int64_t> max_x2() const;
  std::optional<std::int64_t> min_q4() const;
  std::optional<std::int64_t> max_q4() const;
  bool depends_on_x() const;
  bool depends_on_a() const;

  BigInt coefficient_of(const Monomial& m) const;

  MultiLaurent& operator+=(const MultiLaurent& o);
  MultiLaurent& operator-=(const MultiLaurent& o);
  friend MultiLaurent operator+(MultiLaurent a, const MultiLaurent& b) {
    a += b;
    return a;
  }
  friend MultiLaurent operator-(MultiLaurent a, const MultiLaurent& b) {
    a -= b;
    return a;
  }
  MultiLaurent operator-() const;
  friend MultiLaurent operator*(const MultiLaurent& a, const MultiLaurent& b);
  MultiLaurent& operator*=(const MultiLaurent& o) {
    *this = *this * o;
    return *this;
  }
  friend bool operator==(const MultiLaurent& a, const MultiLaurent& b) {
    return a.t_ == b.t_;
  }

  MultiLaurent times_monomial(const BigInt& c, const Monomial& m) const;
  MultiLaurent pow(std::uint64_t n) const;

  /// Exact division; throws NonIntegralEvaluation unless divisor divides
  /// exactly (verified by re-multiplication).
  MultiLaurent divide_exact(const MultiLaurent& divisor) const;
  /// Coefficient-wise exact division by an integer.
  MultiLaurent divide_exact(const BigInt& c) const;

  // ---- substitutions (all return a new polynomial) ----
  MultiLaurent subst_q_inverse() const;  ///< q -> q^{-1}
  MultiLaurent subst_x_inverse() const;  ///< x -> x^{-1}
  MultiLaurent subst_x_q_int(std::int64_t k) const;  ///< x -> q^{k}, k integer
  MultiLaurent subst_a_q_int(std::int64_t k) const;  ///< a -> q^{k}, k integer
  MultiLaurent subst_q_one() const;  ///< q -> 1
  MultiLaurent subst_x_one() const;  ///< x -> 1

  /// Split into x-graded slices: map from x2 to the x-free coefficient.
  std::map<std::int64_t, MultiLaurent> split_by_x() const;

  /// Canonical human-readable rendering, e.g. "1 - q + 2*q^2 - q^{7/2}*x".
  /// The Alexander variable is rendered as "t" when render_x_as_t is set.
  std::string to_string(bool render_x_as_t = false) const;

 private:
  void normalize_();
  std::vector<Term> t_;
};

/// Render one monomial with coefficient (used by to_string and diagnostics).
std::string term_to_string(const BigInt& c, const Monomial& m,
                           bool render_x_as_t = false);

}  // namespace fk::algebra
