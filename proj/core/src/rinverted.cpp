#include <algorithm>
#include <limits>

#include "fk/algebra/qfunc.hpp"
#include "fk/errors.hpp"
#include "fk/rmatrix/rmatrix.hpp"

// Closed forms for inverse-crossing elements, including the inverted-label
// regime where the b/b' slots carry strictly negative entries and the
// element becomes a graded series in u = x^{-1}.

namespace fk::rmatrix {
namespace {

using algebra::Monomial;
using algebra::pochhammer;
using algebra::qinv_pochhammer;

MultiLaurent q_mono(std::int64_t q4) {
  return MultiLaurent::monomial(1, Monomial{q4, 0, 0});
}

bool conserves_entrywise(const Label& a, const Label& b, const Label& ap,
                         const Label& bp) {
  for (int i = 1; i <= a.rank_n() - 1; ++i)
    if (a.at(i) + b.at(i) != ap.at(i) + bp.at(i)) return false;
  return true;
}

/// (q^{-b}; q)_{a'} / (q^{-1}; q^{-1})_{a'} — the label-generic core of the
/// rank-2 closed form; an exact Laurent polynomial (Gaussian binomial times
/// a signed monomial). Zero exactly when 0 <= b < a'.
MultiLaurent rank2_core(std::int64_t b, std::int64_t ap) {
  const MultiLaurent numer = pochhammer(q_mono(-4 * b), 4, ap);
  if (numer.is_zero()) return numer;
  return numer.divide_exact(qinv_pochhammer(ap));
}

/// Signed monomial prefactor of the rank-2 closed form:
/// (-1)^{b + a'} q^{(b' + a^2 - 2 a a' - a - b'^2)/2} x^{(b + b')/2}.
MultiLaurent rank2_prefactor(std::int64_t a, std::int64_t b, std::int64_t ap,
                             std::int64_t bp) {
  const std::int64_t q4 = 2 * (bp + a * a - 2 * a * ap - a - bp * bp);
  const int sign = (b + ap) % 2 == 0 ? 1 : -1;
  return MultiLaurent::monomial(sign, Monomial{q4, b + bp, 0});
}

/// 1 / prod_{k=0}^{len-1} (1 - u q^{e0 + k}) as a U-graded series.
XSeries inverse_u_pochhammer(std::int64_t e0, std::int64_t len,
                             const Caps& caps) {
  XSeries s(XSeries::Var::U, caps);
  s.add_at(0, MultiLaurent::one());
  for (std::int64_t k = 0; k < len; ++k) {
    const MultiLaurent mono =
        MultiLaurent::monomial(1, Monomial{4 * (e0 + k), -2, 0});
    s.multiply_series(
        XSeries::expand_inverse_one_minus(XSeries::Var::U, caps, mono));
  }
  return s;
}

XSeries rank2_inverted(const Label& a, const Label& b, const Label& ap,
                       const Label& bp, const Caps& caps) {
  const std::int64_t A = a.at(1), B = b.at(1), Ap = ap.at(1), Bp = bp.at(1);
  XSeries out(XSeries::Var::U, caps);
  if (A + B != Ap + Bp) return out;

  // (x^{-1} q^{a}; q)_{b - a'} with negative length flips into the
  // reciprocal ascending product of length a' - b starting at q^{a+b-a'}.
  out = inverse_u_pochhammer(A - (Ap - B), Ap - B, caps);
  out.multiply_poly(rank2_prefactor(A, B, Ap, Bp) * rank2_core(B, Ap));
  return out;
}

std::int64_t mixed_term(ExponentReading reading, const Label& a,
                        const Label& b, const Label& ap, const Label& bp) {
  switch (reading) {
    case ExponentReading::VectorDot:
      return (b.at(1) - ap.at(1)) * (bp.at(1) + ap.at(1) - 1) +
             (b.at(2) - ap.at(2)) * (bp.at(2) + ap.at(2) - 1);
    case ExponentReading::FirstEntry:
      return (b.at(1) - ap.at(1)) * (bp.at(1) + ap.at(1) - 1);
    case ExponentReading::EntrySums:
      return (b.at(1) + b.at(2) - ap.at(1) - ap.at(2)) *
             (bp.at(1) + bp.at(2) + ap.at(1) + ap.at(2) - 1);
    default:
      // Solved exactly against the transported inverse elements: first-entry
      // contraction with the roles of a and a' exchanged in the second factor
      // and the opposite sign.
      return (ap.at(1) - b.at(1)) * (a.at(1) + bp.at(1) - 1);
  }
}

/// Four times the q-exponent of the r-th term of the rank-3 closed form
/// (the element carries q to *minus* this quantity; quarter powers are
/// genuine above rank two).
std::int64_t rank3_four_exponent(const Label& a, const Label& b,
                                 const Label& ap, const Label& bp,
                                 std::int64_t r, ExponentReading reading) {
  const std::int64_t a1 = a.at(1), a2 = a.at(2), b1 = b.at(1), b2 = b.at(2);
  const std::int64_t p1 = ap.at(1), p2 = ap.at(2);
  return 2 * (b2 * b2 + p2 * p2 + r * r) + (4 * a1 + 4 * r - a2) * p1 +
         (2 + a1) * p2 - 2 * mixed_term(reading, a, b, ap, bp) +
         b1 * (p2 - a2) + 2 * r -
         b2 * (2 + 3 * a1 - 4 * a2 + p1 + 4 * p2 + 4 * r);
}

/// Everything in the r-th rank-3 term that is exact and x-free: sign, the
/// q-power, the two ascending Pochhammers, and their (q^{-1};q^{-1})
/// denominators. Returns zero when the term vanishes.
MultiLaurent rank3_exact_part(const Label& a, const Label& b, const Label& ap,
                              const Label& bp, std::int64_t r,
                              ExponentReading reading) {
  MultiLaurent numer = pochhammer(q_mono(-4 * b.at(2)), 4, ap.at(2) + r);
  if (numer.is_zero()) return numer;
  numer = numer * pochhammer(q_mono(4 * (ap.at(2) - b.at(1) + r)), 4,
                             ap.at(1) - ap.at(2));
  if (numer.is_zero()) return numer;

  const std::int64_t four = rank3_four_exponent(a, b, ap, bp, r, reading);
  const int sign =
      (b.at(1) + ap.at(1) + b.at(2) + ap.at(2) + r) % 2 == 0 ? 1 : -1;
  MultiLaurent denom = qinv_pochhammer(ap.at(1) - ap.at(2)) *
                       qinv_pochhammer(ap.at(2)) * qinv_pochhammer(r);
  return numer.times_monomial(sign, Monomial{-four, 0, 0})
      .divide_exact(denom);
}

/// Ascending geometric factors for 1/(q^{a2-a1-L}; q)_L rewritten with
/// positive exponents: (-1)^L q^{sum} prod_k 1/(1 - q^{v_k}),
/// v_k = a1 - a2 + L - k for k = 0..L-1.
struct AscendingReciprocal {
  MultiLaurent prefactor;             // (-1)^L q^{sum v_k}
  std::vector<std::int64_t> steps4;   // scaled exponents 4 v_k, all > 0
};

AscendingReciprocal ascending_reciprocal(std::int64_t a1_minus_a2,
                                         std::int64_t L) {
  AscendingReciprocal out;
  std::int64_t sum = 0;
  for (std::int64_t k = 0; k < L; ++k) {
    const std::int64_t v = a1_minus_a2 + L - k;
    require(v > 0, "reciprocal Pochhammer factor must have positive power");
    sum += v;
    out.steps4.push_back(4 * v);
  }
  out.prefactor = MultiLaurent::monomial(L % 2 == 0 ? 1 : -1,
                                         Monomial{4 * sum, 0, 0});
  return out;
}

/// prod_k 1/(1 - q^{v_k}) expanded ascending and truncated at scaled exponent
/// q4cap (inclusive). All exponents are multiples of four on the scaled
/// lattice, so the product is a dense partition-count recurrence.
MultiLaurent geometric_product(const std::vector<std::int64_t>& steps4,
                               std::int64_t q4cap) {
  if (q4cap < 0) return MultiLaurent::zero();
  const std::size_t slots = static_cast<std::size_t>(q4cap / 4) + 1;
  std::vector<BigInt> dense(slots, BigInt(0));
  dense[0] = 1;
  for (auto step4 : steps4) {
    const std::size_t step = static_cast<std::size_t>(step4 / 4);
    for (std::size_t e = step; e < slots; ++e) dense[e] += dense[e - step];
  }
  std::vector<std::pair<Monomial, BigInt>> terms;
  for (std::size_t e = 0; e < slots; ++e)
    if (dense[e] != 0)
      terms.emplace_back(Monomial{static_cast<std::int64_t>(4 * e), 0, 0},
                         dense[e]);
  return MultiLaurent::from_terms(std::move(terms));
}

std::int64_t min_q4_over_grades(const XSeries& s) {
  std::int64_t m = std::numeric_limits<std::int64_t>::max();
  for (const auto& [grade, coeff] : s.grades())
    if (auto q = coeff.min_q4()) m = std::min(m, *q);
  return m;
}

XSeries rank3_inverted(const Label& a, const Label& b, const Label& ap,
                       const Label& bp, const Caps& caps) {
  if (!caps.q4_max)
    raise(ErrorCode::CapsMissing,
          "rank-3 inverted elements are ascending q-series; set a q window");
  XSeries out(XSeries::Var::U, caps);
  out.mark_q_truncated();
  if (!conserves_entrywise(a, b, ap, bp)) return out;

  // The u-carrying factor (x^{-1} q^{a_1}; q)_{b_1 - a'_1} does not involve
  // r; expand it once.
  const std::int64_t L1 = ap.at(1) - b.at(1);
  XSeries base = inverse_u_pochhammer(a.at(1) - L1, L1, caps);
  base.multiply_poly(
      MultiLaurent::monomial(1, Monomial{0, b.at(1) + bp.at(1), 0}));
  if (base.is_zero()) return out;
  const std::int64_t base_min = min_q4_over_grades(base);

  // The exact x-free part of the r-th term, kept as running state: one
  // binomial multiplication and one exact binomial division per step instead
  // of rebuilding the Pochhammers from scratch.
  //   A_r = (q^{m2}; q)_{p2+r} / [(q^{-1};q^{-1})_{p2} (q^{-1};q^{-1})_r]
  //   B_r = (q^{s0+r}; q)_{m} / (q^{-1};q^{-1})_{m}
  // with m2 = -b_2 > 0, s0 = a'_2 - b_1 > 0, m = a'_1 - a'_2 >= 0; both are
  // unit-monomial multiples of q-binomial polynomials, so the divisions stay
  // exact.
  const std::int64_t m2 = -b.at(2);
  const std::int64_t p1 = ap.at(1), p2 = ap.at(2);
  const std::int64_t m = p1 - p2;
  const std::int64_t s0 = p2 - b.at(1);
  MultiLaurent A =
      pochhammer(q_mono(4 * m2), 4, p2).divide_exact(qinv_pochhammer(p2));
  MultiLaurent B =
      pochhammer(q_mono(4 * s0), 4, m).divide_exact(qinv_pochhammer(m));
  const MultiLaurent one = MultiLaurent::one();

  int empty_streak = 0;
  for (std::int64_t r = 0;; ++r) {
    require(r < 4096, "rank-3 inverted r-sum failed to stabilise");
    if (r > 0) {
      A = (A * (one - q_mono(4 * (m2 + p2 + r - 1))))
              .divide_exact(one - q_mono(-4 * r));
      if (m > 0)
        B = (B * (one - q_mono(4 * (s0 + r - 1 + m))))
                .divide_exact(one - q_mono(4 * (s0 + r - 1)));
    }
    const std::int64_t four =
        rank3_four_exponent(a, b, ap, bp, r, ExponentReading::Calibrated);
    const int sign =
        (b.at(1) + ap.at(1) + b.at(2) + ap.at(2) + r) % 2 == 0 ? 1 : -1;
    MultiLaurent factor = (A * B).times_monomial(sign, Monomial{-four, 0, 0});

    // 1/(q^{a_2-a_1}; q)_{L2} with L2 = a'_2 + r - b_2 > 0, rewritten into
    // ascending factors and truncated against the deepest q-power already
    // present in the rest of the term.
    const std::int64_t L2 = p2 + r + m2;
    const AscendingReciprocal rec = ascending_reciprocal(a.at(1) - a.at(2), L2);
    factor = factor * rec.prefactor;

    XSeries term(XSeries::Var::U, caps);
    if (!factor.is_zero()) {
      const std::int64_t margin =
          *caps.q4_max - (base_min + *factor.min_q4());
      if (margin >= 0) {
        factor = algebra::truncate_q(
            factor * geometric_product(rec.steps4, margin),
            *caps.q4_max - base_min);
        term = base;
        term.multiply_poly(factor);
      }
    }
    if (term.is_zero()) {
      if (++empty_streak >= 2) break;
    } else {
      empty_streak = 0;
      out.add_series(term);
    }
  }
  out.mark_q_truncated();
  return out;
}

}  // namespace

MultiLaurent r_inverse_rank2_closed(std::int64_t a, std::int64_t b,
                                    std::int64_t ap, std::int64_t bp) {
  require(a >= 0 && b >= 0 && ap >= 0 && bp >= 0,
          "closed-form check takes nonnegative labels");
  if (a + b != ap + bp) return MultiLaurent::zero();
  const MultiLaurent core = rank2_core(b, ap);
  if (core.is_zero()) return core;
  // Nonzero core forces b >= a', so the u-carrying Pochhammer has a
  // nonnegative length and stays polynomial.
  const MultiLaurent upoly =
      pochhammer(MultiLaurent::monomial(1, Monomial{4 * a, -2, 0}), 4, b - ap);
  return rank2_prefactor(a, b, ap, bp) * core * upoly;
}

MultiLaurent r_inverse_rank3_closed(const Label& a, const Label& b,
                                    const Label& ap, const Label& bp,
                                    ExponentReading reading) {
  require(a.rank_n() == 3 && b.rank_n() == 3 && ap.rank_n() == 3 &&
              bp.rank_n() == 3,
          "rank-3 closed form takes rank-3 labels");
  require(weights::is_valid_positive(a) && weights::is_valid_positive(b) &&
              weights::is_valid_positive(ap) && weights::is_valid_positive(bp),
          "closed-form check takes staircase labels");
  if (!conserves_entrywise(a, b, ap, bp)) return MultiLaurent::zero();

  const std::int64_t rlo =
      std::max<std::int64_t>(0, a.at(2) + b.at(2) - a.at(1) - ap.at(2));
  const std::int64_t rhi =
      std::min(b.at(1) - ap.at(1), b.at(2) - ap.at(2));
  MultiLaurent sum = MultiLaurent::zero();
  for (std::int64_t r = rlo; r <= rhi; ++r) {
    MultiLaurent exact = rank3_exact_part(a, b, ap, bp, r, reading);
    if (exact.is_zero()) continue;
    // For staircase labels the remaining factors are plain polynomials.
    exact = exact * pochhammer(q_mono(4 * (a.at(2) - a.at(1))), 4,
                               b.at(2) - ap.at(2) - r);
    exact = exact * pochhammer(
                        MultiLaurent::monomial(1, Monomial{4 * a.at(1), -2, 0}),
                        4, b.at(1) - ap.at(1));
    sum += exact.times_monomial(1, Monomial{0, b.at(1) + bp.at(1), 0});
  }
  return sum;
}

XSeries r_inverse_inverted(int N, const Label& a, const Label& b,
                           const Label& ap, const Label& bp,
                           const Caps& caps) {
  if (N != 2 && N != 3)
    raise(ErrorCode::UnsupportedRank,
          "inverted-label elements are implemented for ranks 2 and 3");
  require(a.rank_n() == N && b.rank_n() == N && ap.rank_n() == N &&
              bp.rank_n() == N,
          "label rank mismatch");
  require(weights::is_valid_positive(a) && weights::is_valid_positive(ap),
          "left labels of an inverted element are staircases");
  require(weights::is_valid_inverted(b) && weights::is_valid_inverted(bp),
          "right labels of an inverted element are inverted");
  return N == 2 ? rank2_inverted(a, b, ap, bp, caps)
                : rank3_inverted(a, b, ap, bp, caps);
}

}  // namespace fk::rmatrix
