// Exact-arithmetic foundation tests. Expected values are frozen by hand
// (independent of the implementation): small quantum integers, Pochhammer
// expansions, the descending-base and inversion identities, and window
// semantics of the graded series layer.
#include <gtest/gtest.h>

#include "fk/algebra/laurent.hpp"
#include "fk/algebra/parse.hpp"
#include "fk/algebra/qfunc.hpp"
#include "fk/algebra/series.hpp"

using namespace fk;
using namespace fk::algebra;

namespace {

MultiLaurent P(const std::string& s) { return parse_poly(s); }

MultiLaurent qmono(std::int64_t q4) {
  return MultiLaurent::monomial(1, q_power4(q4));
}

TEST(QuantumInteger, SmallValues) {
  EXPECT_TRUE(quantum_integer(0).is_zero());
  EXPECT_EQ(quantum_integer(1), P("1"));
  EXPECT_EQ(quantum_integer(2), P("q^{-1/2} + q^{1/2}"));
  EXPECT_EQ(quantum_integer(3), P("q^{-1} + 1 + q"));
  EXPECT_EQ(quantum_integer(4), P("q^{-3/2} + q^{-1/2} + q^{1/2} + q^{3/2}"));
  EXPECT_EQ(quantum_integer(-3), -quantum_integer(3));
}

TEST(QuantumInteger, FactorialProduct) {
  EXPECT_EQ(quantum_factorial(3),
            P("q^{-3/2} + 2*q^{-1/2} + 2*q^{1/2} + q^{3/2}"));
  EXPECT_EQ(quantum_factorial(4), quantum_factorial(3) * quantum_integer(4));
}

TEST(Pochhammer, XBaseExpansion) {
  MultiLaurent x = MultiLaurent::monomial(1, x_power2(2));
  EXPECT_EQ(pochhammer(x, 4, 0), P("1"));
  EXPECT_EQ(pochhammer(x, 4, 3),
            P("1 - (1 + q + q^2)*x + (q + q^2 + q^3)*x^2 - q^3*x^3"));
}

// (y; q^{-1})_n = (-1)^n y^n q^{-n(n-1)/2} (y^{-1}; q)_n  at y = q^3, n = 2.
TEST(Pochhammer, DescendingFlipIdentity) {
  MultiLaurent lhs = pochhammer(qmono(12), -4, 2);
  MultiLaurent rhs =
      pochhammer(qmono(-12), 4, 2).times_monomial(1, q_power4(2 * (12 - 2)));
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(lhs, P("(1 - q^3)*(1 - q^2)"));
}

// (q^m; q^{-1})_k = (q;q)_m / (q;q)_{m-k}  at m = 3, k = 2.
TEST(Pochhammer, DescendingEqualsRatio) {
  MultiLaurent lhs = pochhammer(qmono(12), -4, 2);
  MultiLaurent rhs = qq_pochhammer(3).divide_exact(qq_pochhammer(1));
  EXPECT_EQ(lhs, rhs);
}

TEST(Pochhammer, GaussBinomial) {
  EXPECT_EQ(gauss_binomial(4, 2), P("1 + q + 2*q^2 + q^3 + q^4"));
  EXPECT_EQ(gauss_binomial(4, 0), P("1"));
  EXPECT_TRUE(gauss_binomial(3, 5).is_zero());
}

TEST(Laurent, DivisionExactAndInexact) {
  EXPECT_EQ(P("(1 - q^3)").divide_exact(P("1 - q")), P("1 + q + q^2"));
  EXPECT_EQ(P("x^2 - q^2").divide_exact(P("x - q")), P("x + q"));
  EXPECT_THROW(P("1 + q").divide_exact(P("1 - q")), Error);
}

TEST(Laurent, ParseRoundTrip) {
  MultiLaurent p =
      P("-3 + q^{-7/2}*x - 2*q*x^{-1} + a^2*q - x*a + q^{1/2}");
  EXPECT_EQ(parse_poly(p.to_string()), p);
  EXPECT_EQ(P("q(2 + 3q + 11q^2)"), P("2*q + 3*q^2 + 11*q^3"));
  EXPECT_EQ(P("(1 - q^4)/(1 - q)"), P("1 + q + q^2 + q^3"));
  EXPECT_THROW(P("1 + * q"), Error);
  EXPECT_THROW(P("y + 1"), Error);
}

TEST(Laurent, Substitutions) {
  EXPECT_EQ(P("q + x").subst_x_q_int(2), P("q + q^2"));
  EXPECT_EQ(quantum_integer(3).subst_q_inverse(), quantum_integer(3));
  EXPECT_EQ(P("q^2*x - x^{-1}").subst_x_inverse(), P("q^2*x^{-1} - x"));
  EXPECT_EQ(P("a^3*q + a").subst_a_q_int(2), P("q^7 + q^2"));
  EXPECT_EQ(P("3*q^2 - q + x").subst_q_one(), P("2 + x"));
}

TEST(Laurent, SplitAndRender) {
  MultiLaurent p = P("1 - q*x + 2*x");
  auto slices = p.split_by_x();
  ASSERT_EQ(slices.size(), 2u);
  EXPECT_EQ(slices[0], P("1"));
  EXPECT_EQ(slices[2], P("2 - q"));
  EXPECT_EQ(P("-q^{-1} + 1").to_string(), "-q^{-1} + 1");
}

TEST(Series, WindowAndWeyl) {
  XSeries raw(XSeries::Var::U, Caps{.x2_max = 8});
  raw.add_at(0, P("1"));
  raw.add_at(2, P("q"));       // q * u
  raw.add_at(10, P("q^5"));    // outside the window: dropped
  EXPECT_TRUE(raw.coefficient(10).is_zero());

  XSeries sym = raw.weyl_image(2);  // u^m -> q^{2m} x^m
  EXPECT_EQ(sym.coefficient(0), P("1"));
  EXPECT_EQ(sym.coefficient(2), P("q^3"));
}

TEST(Series, MultiplyPolyRespectsGradingDirection) {
  // In the raw grading u = x^{-1}, multiplying by x lowers the grade.
  XSeries raw(XSeries::Var::U, Caps{.x2_max = 8});
  raw.add_at(4, P("1"));
  raw.multiply_poly(P("x"));
  EXPECT_EQ(raw.coefficient(2), P("1"));
  raw.multiply_poly(P("q*x^{-2}"));
  EXPECT_EQ(raw.coefficient(6), P("q"));
}

TEST(Series, NormalizeDividesSignedLeadingMonomial) {
  XSeries s(XSeries::Var::X, Caps{.x2_max = 8});
  s.add_at(-6, P("-q^2"));
  s.add_at(-4, P("5*q^3"));
  auto lead = s.normalize();
  EXPECT_EQ(lead.sign, -1);
  EXPECT_EQ(lead.q4, 8);
  EXPECT_EQ(lead.grade2, -6);
  EXPECT_EQ(s.coefficient(0), P("1"));
  EXPECT_EQ(s.coefficient(2), P("-5*q"));
}

TEST(Series, GeometricExpansions) {
  // q-adic: 1/(1-q) within q-cap 5.
  XSeries qa = XSeries::expand_inverse_one_minus(
      XSeries::Var::X, Caps{.x2_max = 0, .q4_max = 20}, P("q"));
  EXPECT_TRUE(qa.q_truncated());
  EXPECT_EQ(qa.coefficient(0), P("1 + q + q^2 + q^3 + q^4 + q^5"));

  // u-adic: 1/(1 - q x^{-1}) graded in u.
  XSeries ua = XSeries::expand_inverse_one_minus(
      XSeries::Var::U, Caps{.x2_max = 6}, P("q*x^{-1}"));
  EXPECT_EQ(ua.coefficient(0), P("1"));
  EXPECT_EQ(ua.coefficient(2), P("q"));
  EXPECT_EQ(ua.coefficient(6), P("q^3"));
}

TEST(Series, ReciprocalOfXPolynomial) {
  XSeries r = XSeries::reciprocal_x_poly(P("1 - x + x^2"), Caps{.x2_max = 16});
  EXPECT_EQ(r.flatten(), P("1 + x - x^3 - x^4 + x^6 + x^7"));
  XSeries prod = r;
  prod.multiply_poly(P("1 - x + x^2"));
  EXPECT_EQ(prod.flatten(), P("1"));
}

TEST(Series, CollapseXToQ) {
  XSeries s(XSeries::Var::X, Caps{.x2_max = 4});
  s.add_at(0, P("1"));
  s.add_at(2, P("q"));
  s.add_at(4, P("q^2 - q^3"));
  EXPECT_EQ(s.collapse_x_to_q(1), P("1 + q^2 + q^4 - q^5"));
  EXPECT_EQ(s.collapse_x_to_q(2), P("1 + q^3 + q^6 - q^7"));
}

}  // namespace
