// Crossing elements: closed-form anchors, braid relation, inverse identity,
// classical limits, inverted-label series, and the element store.

#include <gtest/gtest.h>

#include <map>
#include <utility>
#include <vector>

#include "fk/algebra/parse.hpp"
#include "fk/algebra/qfunc.hpp"
#include "fk/errors.hpp"
#include "fk/rmatrix/rmatrix.hpp"

namespace {

using fk::algebra::Caps;
using fk::algebra::Monomial;
using fk::algebra::MultiLaurent;
using fk::algebra::parse_poly;
using fk::algebra::pochhammer;
using fk::algebra::XSeries;
using fk::rmatrix::classical_r_element;
using fk::rmatrix::crossing_outputs;
using fk::rmatrix::ExponentReading;
using fk::rmatrix::r_element;
using fk::rmatrix::r_inverse_element;
using fk::rmatrix::r_inverse_inverted;
using fk::rmatrix::r_inverse_rank2_closed;
using fk::rmatrix::r_inverse_rank3_closed;
using fk::weights::enumerate_labels;
using fk::weights::Label;

Label L(std::vector<std::int32_t> e) { return Label{std::move(e)}; }

MultiLaurent xpow2(std::int64_t x2) {
  return MultiLaurent::monomial(1, Monomial{0, x2, 0});
}

TEST(RElement, ZeroLabelsGiveUnitElements) {
  for (int N : {2, 3, 4}) {
    SCOPED_TRACE(N);
    const Label z = fk::weights::zero_label(N);
    EXPECT_TRUE(r_element(N, z, z, z, z).is_one());
    EXPECT_TRUE(r_inverse_element(N, z, z, z, z).is_one());
  }
}

TEST(RElement, Rank2ClosedFormAnchors) {
  for (std::int64_t b = 0; b <= 5; ++b) {
    SCOPED_TRACE(b);
    const auto bb = static_cast<std::int32_t>(b);
    // A zero label entering the crossing passes through with x^{-b/2}.
    EXPECT_EQ(r_element(2, L({0}), L({bb}), L({bb}), L({0})), xpow2(-b));
    EXPECT_EQ(r_element(2, L({bb}), L({0}), L({0}), L({bb})), xpow2(-b));
    // Full transfer back onto the same strand.
    const MultiLaurent expected =
        pochhammer(xpow2(2), -4, b)
            .times_monomial(b % 2 == 0 ? 1 : -1,
                            Monomial{2 * (b * b - b), -2 * b, 0});
    EXPECT_EQ(r_element(2, L({bb}), L({0}), L({bb}), L({0})), expected);
  }
}

TEST(RElement, FrozenSmallRank2Elements) {
  EXPECT_EQ(r_element(2, L({1}), L({1}), L({1}), L({1})),
            parse_poly("q*x^{-1}"));
  EXPECT_EQ(r_element(2, L({1}), L({1}), L({2}), L({0})),
            parse_poly("x^{-1/2} - q*x^{-3/2}"));
  EXPECT_EQ(r_element(2, L({2}), L({1}), L({2}), L({1})),
            parse_poly("(q + q^2)*x^{-1} - (q^2 + q^3)*x^{-2}"));
}

TEST(RElement, LeadingStaircaseElementIsRankIndependent) {
  for (std::int32_t b = 0; b <= 4; ++b) {
    SCOPED_TRACE(b);
    const MultiLaurent rank2 = r_element(2, L({b}), L({0}), L({b}), L({0}));
    EXPECT_EQ(r_element(3, L({b, 0}), L({0, 0}), L({b, 0}), L({0, 0})), rank2);
    EXPECT_EQ(r_element(4, L({b, 0, 0}), L({0, 0, 0}), L({b, 0, 0}),
                        L({0, 0, 0})),
              rank2);
  }
}

// --- operator plumbing for the braid-relation and inverse tests ---

using State = std::vector<Label>;
using Operator = std::map<std::vector<std::int32_t>,
                          std::pair<State, MultiLaurent>>;

std::vector<std::int32_t> packed(const State& s) {
  std::vector<std::int32_t> key;
  for (const auto& l : s) key.insert(key.end(), l.e.begin(), l.e.end());
  return key;
}

Operator identity_on(const State& s) {
  Operator op;
  op.emplace(packed(s), std::make_pair(s, MultiLaurent::one()));
  return op;
}

/// Apply a bare crossing at strand position p (0-based) to every state.
Operator apply_crossing(int N, const Operator& op, std::size_t p,
                        bool inverse) {
  Operator out;
  for (const auto& [key, entry] : op) {
    const auto& [state, coeff] = entry;
    for (const auto& [ap, bp] :
         crossing_outputs(N, state[p], state[p + 1], inverse)) {
      const MultiLaurent elem =
          inverse ? r_inverse_element(N, state[p], state[p + 1], ap, bp)
                  : r_element(N, state[p], state[p + 1], ap, bp);
      if (elem.is_zero()) continue;
      State next = state;
      next[p] = ap;
      next[p + 1] = bp;
      auto [it, inserted] = out.try_emplace(
          packed(next), std::make_pair(next, coeff * elem));
      if (!inserted) it->second.second += coeff * elem;
    }
  }
  // Drop cancelled entries so comparisons see canonical maps.
  for (auto it = out.begin(); it != out.end();)
    it = it->second.second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

TEST(RElement, BraidRelationRankTwo) {
  for (std::int32_t l1 = 0; l1 <= 2; ++l1)
    for (std::int32_t l2 = 0; l2 <= 2; ++l2)
      for (std::int32_t l3 = 0; l3 <= 2; ++l3) {
        SCOPED_TRACE(testing::Message() << l1 << "," << l2 << "," << l3);
        const Operator in = identity_on({L({l1}), L({l2}), L({l3})});
        const Operator lhs = apply_crossing(
            2, apply_crossing(2, apply_crossing(2, in, 0, false), 1, false), 0,
            false);
        const Operator rhs = apply_crossing(
            2, apply_crossing(2, apply_crossing(2, in, 1, false), 0, false), 1,
            false);
        EXPECT_EQ(lhs, rhs);
      }
}

TEST(RElement, BraidRelationRankThree) {
  const auto labels = enumerate_labels(3, 1);
  for (const auto& l1 : labels)
    for (const auto& l2 : labels)
      for (const auto& l3 : labels) {
        const Operator in = identity_on({l1, l2, l3});
        const Operator lhs = apply_crossing(
            3, apply_crossing(3, apply_crossing(3, in, 0, false), 1, false), 0,
            false);
        const Operator rhs = apply_crossing(
            3, apply_crossing(3, apply_crossing(3, in, 1, false), 0, false), 1,
            false);
        EXPECT_EQ(lhs, rhs) << l1.to_string() << " " << l2.to_string() << " "
                            << l3.to_string();
      }
}

TEST(RElement, InverseUndoesCrossing) {
  for (int N : {2, 3}) {
    const auto labels = enumerate_labels(N, N == 2 ? 3 : 1);
    for (const auto& a : labels)
      for (const auto& b : labels) {
        const Operator in = identity_on({a, b});
        const Operator round =
            apply_crossing(N, apply_crossing(N, in, 0, false), 0, true);
        ASSERT_EQ(round.size(), 1u)
            << N << ": " << a.to_string() << " " << b.to_string();
        const auto& [state, coeff] = round.begin()->second;
        EXPECT_EQ(state[0].e, a.e);
        EXPECT_EQ(state[1].e, b.e);
        EXPECT_TRUE(coeff.is_one());
      }
  }
}

TEST(RElement, ClassicalLimitMatchesQToOne) {
  for (int N : {2, 3}) {
    const auto labels = enumerate_labels(N, N == 2 ? 3 : 2);
    for (const auto& a : labels)
      for (const auto& b : labels)
        for (bool inverse : {false, true})
          for (const auto& [ap, bp] : crossing_outputs(N, a, b, inverse)) {
            const MultiLaurent quantum =
                inverse ? r_inverse_element(N, a, b, ap, bp)
                        : r_element(N, a, b, ap, bp);
            EXPECT_EQ(quantum.subst_q_one(),
                      classical_r_element(N, inverse, a, b, ap, bp))
                << N << (inverse ? " inv " : " pos ") << a.to_string() << b.to_string()
                << "->" << ap.to_string() << bp.to_string();
          }
  }
}

TEST(RElement, ElementsStayInTheirXWindow) {
  for (int N : {2, 3}) {
    const auto labels = enumerate_labels(N, N == 2 ? 4 : 2);
    for (const auto& a : labels)
      for (const auto& b : labels)
        for (const auto& [ap, bp] : crossing_outputs(N, a, b, false)) {
          const MultiLaurent elem = r_element(N, a, b, ap, bp);
          if (elem.is_zero()) continue;
          EXPECT_GE(*elem.min_x2(), -(a.at(1) + ap.at(1)));
          EXPECT_LE(*elem.max_x2(), -(b.at(1) + bp.at(1)));
        }
  }
}

TEST(RElement, CrossingOutputsCoverNonzeroElements) {
  const Label a = L({2}), b = L({1});
  const auto outputs = crossing_outputs(2, a, b, false);
  for (std::int32_t ap = 0; ap <= 4; ++ap)
    for (std::int32_t bp = 0; bp <= 4; ++bp) {
      const bool nonzero = !r_element(2, a, b, L({ap}), L({bp})).is_zero();
      const bool listed =
          std::find(outputs.begin(), outputs.end(),
                    std::make_pair(L({ap}), L({bp}))) != outputs.end();
      if (nonzero) EXPECT_TRUE(listed) << ap << "," << bp;
    }
  // Everything listed conserves the entry sum.
  for (const auto& [ap, bp] : outputs) EXPECT_EQ(ap.at(1) + bp.at(1), 3);
}

TEST(RInverse, Rank2ClosedFormMatchesTransport) {
  for (std::int64_t a = 0; a <= 4; ++a)
    for (std::int64_t b = 0; b <= 4; ++b)
      for (std::int64_t ap = 0; ap <= a + b; ++ap) {
        const std::int64_t bp = a + b - ap;
        const auto A = static_cast<std::int32_t>(a);
        const auto B = static_cast<std::int32_t>(b);
        const auto AP = static_cast<std::int32_t>(ap);
        const auto BP = static_cast<std::int32_t>(bp);
        EXPECT_EQ(r_inverse_rank2_closed(a, b, ap, bp),
                  r_inverse_element(2, L({A}), L({B}), L({AP}), L({BP})))
            << a << "," << b << "->" << ap << "," << bp;
      }
}

TEST(RInverse, Rank3ClosedFormPinsTheExponentReading) {
  const auto labels = enumerate_labels(3, 3);
  int compared = 0;
  std::map<ExponentReading, int> mismatches{
      {ExponentReading::VectorDot, 0},
      {ExponentReading::FirstEntry, 0},
      {ExponentReading::EntrySums, 0},
      {ExponentReading::Calibrated, 0}};
  for (const auto& a : labels)
    for (const auto& b : labels)
      for (const auto& [ap, bp] : crossing_outputs(3, a, b, true)) {
        const MultiLaurent want = r_inverse_element(3, a, b, ap, bp);
        for (auto& [reading, count] : mismatches) {
          MultiLaurent got;
          try {
            got = r_inverse_rank3_closed(a, b, ap, bp, reading);
          } catch (const fk::Error&) {
            ++count;  // non-integral exponent: the reading cannot be right
            continue;
          }
          if (!(got == want)) ++count;
        }
        ++compared;
      }
  ASSERT_GT(compared, 400);
  // Only the calibrated contraction reproduces the transported elements;
  // every naive contraction of the mixed label product fails on a large
  // fraction of them, which justifies pinning the calibrated reading.
  EXPECT_EQ(mismatches[ExponentReading::Calibrated], 0);
  EXPECT_GT(mismatches[ExponentReading::VectorDot], 100);
  EXPECT_GT(mismatches[ExponentReading::FirstEntry], 100);
  EXPECT_GT(mismatches[ExponentReading::EntrySums], 100);
}

XSeries u_reciprocal(std::int64_t e0, std::int64_t len, const Caps& caps) {
  XSeries s(XSeries::Var::U, caps);
  s.add_at(0, MultiLaurent::one());
  for (std::int64_t k = 0; k < len; ++k)
    s.multiply_series(XSeries::expand_inverse_one_minus(
        XSeries::Var::U, caps,
        MultiLaurent::monomial(1, Monomial{4 * (e0 + k), -2, 0})));
  return s;
}

TEST(RInverse, InvertedRank2SpecialCases) {
  const Caps caps{12, std::nullopt};
  for (std::int64_t m = 1; m <= 4; ++m) {
    SCOPED_TRACE(m);
    const auto M = static_cast<std::int32_t>(m);
    // Zero left label: (-1)^m q^{-(m+m^2)/2} x^{-m} / (x^{-1}q^{-m}; q)_m.
    XSeries want = u_reciprocal(-m, m, caps);
    want.multiply_poly(MultiLaurent::monomial(
        m % 2 == 0 ? 1 : -1, Monomial{-2 * (m + m * m), -2 * m, 0}));
    const XSeries got =
        r_inverse_inverted(2, L({0}), L({-M}), L({0}), L({-M}), caps);
    EXPECT_EQ(got.flatten(), want.flatten());
  }
  for (std::int64_t a : {1, 2})
    for (std::int64_t m : {2, 3}) {
      SCOPED_TRACE(testing::Message() << a << "," << m);
      const auto A = static_cast<std::int32_t>(a);
      const auto M = static_cast<std::int32_t>(m);
      // (-1)^{a+m} q^{-(a^2+a+m+m^2)/2} x^{-m} (q^m;q)_a / (q^{-1};q^{-1})_a
      //   / (x^{-1} q^{-m}; q)_{a+m}.
      XSeries want = u_reciprocal(-m, a + m, caps);
      const MultiLaurent ratio =
          pochhammer(MultiLaurent::monomial(1, Monomial{4 * m, 0, 0}), 4, a)
              .divide_exact(fk::algebra::qinv_pochhammer(a));
      want.multiply_poly(ratio.times_monomial(
          (a + m) % 2 == 0 ? 1 : -1,
          Monomial{-2 * (a * a + a + m + m * m), -2 * m, 0}));
      const XSeries got =
          r_inverse_inverted(2, L({A}), L({-M}), L({A}), L({-M}), caps);
      EXPECT_EQ(got.flatten(), want.flatten());
    }
}

TEST(RInverse, InvertedRank2LevelMismatchIsZero) {
  const Caps caps{8, std::nullopt};
  EXPECT_TRUE(
      r_inverse_inverted(2, L({1}), L({-3}), L({0}), L({-1}), caps).is_zero());
}

TEST(RInverse, InvertedRank3WindowCoherence) {
  const Label a = L({1, 0}), ap = L({1, 0});
  const Label b = L({-2, -1}), bp = L({-2, -1});
  const Caps tight{10, 40}, wide{16, 72};
  const XSeries t = r_inverse_inverted(3, a, b, ap, bp, tight);
  XSeries w = r_inverse_inverted(3, a, b, ap, bp, wide);
  EXPECT_TRUE(t.q_truncated());
  EXPECT_FALSE(t.is_zero());
  // The lowest u-grade carries |b_1| + |b'_1|.
  EXPECT_EQ(t.grades().begin()->first, 4);
  // Recomputing in a wider window and truncating must reproduce the tight
  // window exactly.
  w.q_truncate(40);
  for (const auto& [grade, coeff] : t.grades()) {
    EXPECT_EQ(coeff, w.coefficient(grade)) << "grade " << grade;
  }
  for (const auto& [grade, coeff] : w.grades()) {
    if (grade <= 10) EXPECT_EQ(coeff, t.coefficient(grade)) << "grade " << grade;
  }
  EXPECT_THROW(
      r_inverse_inverted(3, a, b, ap, bp, Caps{10, std::nullopt}),
      fk::Error);
  EXPECT_THROW(
      r_inverse_inverted(4, fk::weights::zero_label(4), b, ap, bp, tight),
      fk::Error);
}

TEST(RInverse, QuantumDimensionAnchors) {
  using fk::algebra::quantum_integer;
  using fk::rmatrix::quantum_dimension;
  for (std::int64_t k = 0; k <= 5; ++k)
    EXPECT_EQ(quantum_dimension(2, k), quantum_integer(k + 1));
  EXPECT_EQ(quantum_dimension(3, 1), quantum_integer(3));
  EXPECT_EQ(quantum_dimension(3, 2),
            parse_poly("q^{-2} + q^{-1} + 2 + q + q^2"));
}

TEST(RInverse, TraceAndFramingShapes) {
  using fk::rmatrix::framing_monomial;
  using fk::rmatrix::trace_weight;
  EXPECT_EQ(trace_weight(3, L({2, 1})), parse_poly("x*q^{-3}"));
  EXPECT_EQ(trace_weight(2, L({-2})), parse_poly("x^{1/2}*q^{2}"));
  EXPECT_EQ(framing_monomial(3, 1), parse_poly("x^{-1}"));
  EXPECT_EQ(framing_monomial(2, -1), parse_poly("x^{1/2}"));
}

TEST(ElementStore, CachesMatchFreshComputation) {
  fk::rmatrix::ElementStore store;
  const Label a = L({2}), b = L({1}), ap = L({2}), bp = L({1});
  const MultiLaurent& first = store.positive(2, a, b, ap, bp);
  EXPECT_EQ(first, r_element(2, a, b, ap, bp));
  const MultiLaurent& second = store.positive(2, a, b, ap, bp);
  EXPECT_EQ(&first, &second);  // stable reference, no recompute

  const Caps caps{8, 32};
  const Label bz = L({-2, -1});
  const XSeries& inv =
      store.inverse_inverted(3, L({1, 0}), bz, L({1, 0}), bz, caps);
  EXPECT_EQ(inv.flatten(),
            r_inverse_inverted(3, L({1, 0}), bz, L({1, 0}), bz, caps).flatten());
}

}  // namespace
