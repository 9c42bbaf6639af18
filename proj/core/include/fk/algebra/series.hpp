/**
 * @file series.hpp
 * @brief Graded series with truncation windows.
 *
 * An XSeries is a sparse map grade -> x-free coefficient polynomial, together
 * with the truncation window it was computed in. The grading variable is
 * either x itself (final results, quiver evaluations) or u := x^{-1} (raw
 * state sums, which are power series in x^{-1} before the symmetry map).
 *
 * Window semantics: grades above x_cap2 are outside the window and silently
 * dropped; if a q-cap is set, coefficient terms with q-power above it are
 * dropped and the series is flagged q_truncated. All arithmetic respects the
 * window, so a q_truncated=false result is exact within its window.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fk/algebra/laurent.hpp"

namespace fk::algebra {

/// Truncation window. Caps are inclusive scaled exponents (x2 = twice the
/// x-power, q4 = four times the q-power).
struct Caps {
  std::int64_t x2_max = 0;
  std::optional<std::int64_t> q4_max;
};

class XSeries {
 public:
  /// Grading variable: X for series in x, U for series in u = x^{-1}.
  enum class Var { X, U };

  XSeries(Var var, Caps caps) : var_(var), caps_(caps) {}

  Var var() const { return var_; }
  const Caps& caps() const { return caps_; }
  bool q_truncated() const { return q_truncated_; }
  void mark_q_truncated() { q_truncated_ = true; }
  bool is_zero() const { return g_.empty(); }

  const std::map<std::int64_t, MultiLaurent>& grades() const { return g_; }

  /// Coefficient at a grade (zero polynomial if absent).
  MultiLaurent coefficient(std::int64_t grade2) const;

  /// Add an x-free polynomial at a grade; applies the window.
  void add_at(std::int64_t grade2, const MultiLaurent& coeff);

  /// Add a whole same-variable series.
  void add_series(const XSeries& o);

  /// A polynomial decomposed into (x-exponent, x-free slice) pairs, ready to
  /// be multiplied into many series without re-splitting.
  using PolySlices = std::vector<std::pair<std::int64_t, MultiLaurent>>;
  static PolySlices split_poly(const MultiLaurent& p);

  /// Multiply by a polynomial that may carry x-powers: an x-power x^k shifts
  /// the grade by +k when grading in X and by -k when grading in U.
  void multiply_poly(const MultiLaurent& p);

  /// Same product taking a pre-split polynomial.
  void multiply_split_poly(const PolySlices& slices);

  /// Series product (grade-wise convolution within the window).
  void multiply_series(const XSeries& o);

  /// Symmetry map for raw (U-graded) sums: u^m -> q^{N m} x^m. Returns an
  /// X-graded series in the same window.
  XSeries weyl_image(std::int64_t N) const;

  /// The signed monomial removed by normalisation.
  struct Leading {
    int sign = 1;
    std::int64_t q4 = 0;
    std::int64_t a2 = 0;
    std::int64_t grade2 = 0;
  };

  /// Divide by the signed leading monomial (lowest grade, then lowest
  /// (q,a)-term) so the series starts with 1*x^0. The leading coefficient
  /// must be +-1. X-graded series only.
  Leading normalize();

  /// Drop coefficient terms above a q-cap (tightens the window).
  void q_truncate(std::int64_t q4max);

  /// Apply q -> 1 to every coefficient (classical limit of the window).
  XSeries classical_image() const;

  /// Substitute x -> q^k (k integral) across grades and coefficients,
  /// producing a single q-polynomial; terms beyond the q-cap are dropped.
  MultiLaurent collapse_x_to_q(std::int64_t k) const;

  /// One polynomial with the grades written back into x-powers (U grading
  /// produces negative x-powers).
  MultiLaurent flatten() const;

  /// Expansion of 1/(1 - mono) within the window. `mono` must be a signed
  /// monomial that moves strictly up the window order: either it carries an
  /// x-power in the direction of the grading variable, or it is x-free with
  /// strictly positive q-power.
  static XSeries expand_inverse_one_minus(Var var, Caps caps,
                                          const MultiLaurent& mono);

  /// Reciprocal of a polynomial in x with constant term exactly 1, as an
  /// X-graded series (used for classical-limit references).
  static XSeries reciprocal_x_poly(const MultiLaurent& p, Caps caps);

  std::string to_string() const { return flatten().to_string(); }

 private:
  Var var_;
  Caps caps_;
  bool q_truncated_ = false;
  std::map<std::int64_t, MultiLaurent> g_;
};

/// Drop terms with q4 > cap; flags whether anything was dropped.
MultiLaurent truncate_q(const MultiLaurent& p, std::int64_t q4max,
                        bool* dropped = nullptr);

}  // namespace fk::algebra
