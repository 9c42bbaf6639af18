#include "fk/algebra/series.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace fk::algebra {

MultiLaurent truncate_q(const MultiLaurent& p, std::int64_t q4max,
                        bool* dropped) {
  bool any_drop = false;
  for (const auto& [m, c] : p.terms())
    if (m.q4 > q4max) {
      any_drop = true;
      break;
    }
  if (dropped) *dropped = any_drop;
  if (!any_drop) return p;
  std::vector<MultiLaurent::Term> kept;
  kept.reserve(p.term_count());
  for (const auto& [m, c] : p.terms())
    if (m.q4 <= q4max) kept.emplace_back(m, c);
  // A subsequence of a canonically ordered term list stays canonical.
  return MultiLaurent::from_canonical_terms(std::move(kept));
}

namespace {

bool pure_q(const MultiLaurent& p) {
  for (const auto& [m, c] : p.terms())
    if (m.x2 != 0 || m.a2 != 0) return false;
  return true;
}

/**
 * @brief Dense product of grade-indexed q-polynomials.
 *
 * Computes g[ga + shift] += ca * poly for every grade of `g` against every
 * (shift, poly) factor, accumulating straight into dense q-strips so the
 * result of each strip comes out already canonical.  The q-window is applied
 * while accumulating: slots above the cap are never allocated, and `truncated`
 * reports whether any product term fell above it (before cancellation, so the
 * flag can over-report but never under-report).
 *
 * Returns false without touching `g` when the shape does not qualify —
 * a coefficient involving x or a, or a q-lattice too wide to hold densely.
 */
bool dense_grade_multiply(
    std::map<std::int64_t, MultiLaurent>& g,
    const std::vector<std::pair<std::int64_t, const MultiLaurent*>>& rhs,
    const Caps& caps, bool* truncated) {
  *truncated = false;
  if (g.empty()) return true;
  if (rhs.empty()) {
    g.clear();
    return true;
  }
  std::int64_t alo = std::numeric_limits<std::int64_t>::max();
  std::int64_t ahi = std::numeric_limits<std::int64_t>::min();
  std::int64_t blo = alo, bhi = ahi;
  for (const auto& [ga, ca] : g) {
    if (!pure_q(ca)) return false;
    alo = std::min(alo, ca.trailing().first.q4);
    ahi = std::max(ahi, ca.leading().first.q4);
  }
  for (const auto& [sb, pb] : rhs) {
    if (pb->is_zero() || !pure_q(*pb)) return false;
    blo = std::min(blo, pb->trailing().first.q4);
    bhi = std::max(bhi, pb->leading().first.q4);
  }
  std::int64_t stride = 0;
  for (const auto& [ga, ca] : g)
    for (const auto& [m, c] : ca.terms()) stride = std::gcd(stride, m.q4 - alo);
  for (const auto& [sb, pb] : rhs)
    for (const auto& [m, c] : pb->terms()) stride = std::gcd(stride, m.q4 - blo);
  if (stride == 0) stride = 1;
  const std::int64_t base = alo + blo;
  std::int64_t hi = ahi + bhi;
  if (caps.q4_max && *caps.q4_max < hi) hi = *caps.q4_max;
  if (hi < base) {  // the whole product sits above the window
    g.clear();
    *truncated = true;
    return true;
  }
  const std::int64_t width = (hi - base) / stride + 1;
  if (width > (std::int64_t{1} << 22)) return false;

  std::map<std::int64_t, std::vector<BigInt>> strips;
  for (const auto& [ga, ca] : g) {
    for (const auto& [sb, pb] : rhs) {
      const std::int64_t grade = ga + sb;
      if (grade > caps.x2_max) continue;
      auto [it, fresh] = strips.try_emplace(grade);
      if (fresh) it->second.resize(static_cast<std::size_t>(width));
      std::vector<BigInt>& strip = it->second;
      for (const auto& [ma, cca] : ca.terms()) {
        if (ma.q4 + pb->trailing().first.q4 > hi) {
          *truncated = true;  // this and all later rows fall above the cap
          break;
        }
        const std::int64_t off0 = ma.q4 - base;
        for (const auto& [mb, ccb] : pb->terms()) {
          if (ma.q4 + mb.q4 > hi) {
            *truncated = true;
            break;
          }
          mpz_addmul(
              strip[static_cast<std::size_t>((off0 + mb.q4) / stride)]
                  .get_mpz_t(),
              cca.get_mpz_t(), ccb.get_mpz_t());
        }
      }
    }
  }

  std::map<std::int64_t, MultiLaurent> out;
  for (auto& [grade, strip] : strips) {
    std::vector<MultiLaurent::Term> terms;
    for (std::size_t i = 0; i < strip.size(); ++i) {
      if (strip[i] == 0) continue;
      terms.emplace_back(
          Monomial{base + static_cast<std::int64_t>(i) * stride, 0, 0},
          std::move(strip[i]));
    }
    if (!terms.empty())
      out.emplace(grade,
                  MultiLaurent::from_canonical_terms(std::move(terms)));
  }
  g = std::move(out);
  return true;
}

}  // namespace

MultiLaurent XSeries::coefficient(std::int64_t grade2) const {
  auto it = g_.find(grade2);
  return it == g_.end() ? MultiLaurent::zero() : it->second;
}

void XSeries::add_at(std::int64_t grade2, const MultiLaurent& coeff) {
  if (coeff.is_zero()) return;
  require(!coeff.depends_on_x(), "XSeries coefficients must be x-free");
  if (grade2 > caps_.x2_max) return;  // outside the window by definition
  MultiLaurent c = coeff;
  if (caps_.q4_max) {
    bool dropped = false;
    c = truncate_q(c, *caps_.q4_max, &dropped);
    if (dropped) q_truncated_ = true;
    if (c.is_zero()) return;
  }
  auto [it, inserted] = g_.emplace(grade2, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) g_.erase(it);
  }
}

void XSeries::add_series(const XSeries& o) {
  require(o.var_ == var_, "cannot add series in different grading variables");
  if (o.q_truncated_) q_truncated_ = true;
  for (const auto& [grade2, coeff] : o.g_) add_at(grade2, coeff);
}

XSeries::PolySlices XSeries::split_poly(const MultiLaurent& p) {
  PolySlices out;
  for (auto& [xpow2, slice] : p.split_by_x())
    out.emplace_back(xpow2, std::move(slice));
  return out;
}

void XSeries::multiply_poly(const MultiLaurent& p) {
  if (p.is_zero()) {
    g_.clear();
    return;
  }
  multiply_split_poly(split_poly(p));
}

void XSeries::multiply_split_poly(const PolySlices& slices) {
  if (slices.empty()) {
    g_.clear();
    return;
  }
  const std::int64_t dir = (var_ == Var::X) ? 1 : -1;
  std::vector<std::pair<std::int64_t, const MultiLaurent*>> rhs;
  rhs.reserve(slices.size());
  for (const auto& [xpow2, slice] : slices)
    rhs.emplace_back(dir * xpow2, &slice);
  bool dropped = false;
  if (dense_grade_multiply(g_, rhs, caps_, &dropped)) {
    if (dropped) q_truncated_ = true;
    return;
  }
  std::map<std::int64_t, MultiLaurent> out;
  for (const auto& [shift, slice] : rhs) {
    for (const auto& [grade2, coeff] : g_) {
      std::int64_t grade = grade2 + shift;
      if (grade > caps_.x2_max) continue;
      MultiLaurent term = coeff * *slice;
      if (caps_.q4_max) {
        bool tq = false;
        term = truncate_q(term, *caps_.q4_max, &tq);
        if (tq) q_truncated_ = true;
      }
      if (term.is_zero()) continue;
      auto [it, inserted] = out.try_emplace(grade, std::move(term));
      if (!inserted) it->second += term;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  g_ = std::move(out);
}

void XSeries::multiply_series(const XSeries& o) {
  require(o.var_ == var_, "cannot multiply series in different variables");
  if (o.q_truncated_) q_truncated_ = true;
  std::vector<std::pair<std::int64_t, const MultiLaurent*>> rhs;
  rhs.reserve(o.g_.size());
  for (const auto& [gb, cb] : o.g_) rhs.emplace_back(gb, &cb);
  bool dropped = false;
  if (dense_grade_multiply(g_, rhs, caps_, &dropped)) {
    if (dropped) q_truncated_ = true;
    return;
  }
  std::map<std::int64_t, MultiLaurent> out;
  for (const auto& [ga, ca] : g_) {
    for (const auto& [gb, cb] : o.g_) {
      std::int64_t grade = ga + gb;
      if (grade > caps_.x2_max) continue;
      MultiLaurent term = ca * cb;
      if (caps_.q4_max) {
        bool tq = false;
        term = truncate_q(term, *caps_.q4_max, &tq);
        if (tq) q_truncated_ = true;
      }
      if (term.is_zero()) continue;
      auto [it, inserted] = out.try_emplace(grade, std::move(term));
      if (!inserted) it->second += term;
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  g_ = std::move(out);
}

XSeries XSeries::weyl_image(std::int64_t N) const {
  require(var_ == Var::U, "weyl_image applies to raw u-graded series");
  XSeries out(Var::X, caps_);
  out.q_truncated_ = q_truncated_;
  for (const auto& [m2, coeff] : g_) {
    // u^m -> q^{N m} x^m: the coefficient picks up q-power N*m.
    MultiLaurent shifted = coeff.times_monomial(1, q_power4(2 * N * m2));
    out.add_at(m2, shifted);
  }
  return out;
}

XSeries::Leading XSeries::normalize() {
  require(var_ == Var::X, "normalize applies to x-graded series");
  require(!g_.empty(), "normalize on empty series");
  const auto& [grade2, coeff] = *g_.begin();
  const auto& [mono, c] = coeff.trailing();  // lowest (q,a) in lowest grade
  if (!is_unit(c))
    raise(ErrorCode::Internal,
          "series leading coefficient is not a unit; normalisation convention "
          "violated");
  Leading lead;
  lead.sign = (c < 0) ? -1 : 1;
  lead.q4 = mono.q4;
  lead.a2 = mono.a2;
  lead.grade2 = grade2;
  std::map<std::int64_t, MultiLaurent> out;
  for (const auto& [g2, cf] : g_) {
    MultiLaurent adj =
        cf.times_monomial(lead.sign, Monomial{-lead.q4, 0, -lead.a2});
    out.emplace(g2 - lead.grade2, std::move(adj));
  }
  g_ = std::move(out);
  return lead;
}

void XSeries::q_truncate(std::int64_t q4max) {
  caps_.q4_max = caps_.q4_max ? std::min(*caps_.q4_max, q4max) : q4max;
  for (auto it = g_.begin(); it != g_.end();) {
    bool dropped = false;
    it->second = truncate_q(it->second, q4max, &dropped);
    if (dropped) q_truncated_ = true;
    it = it->second.is_zero() ? g_.erase(it) : std::next(it);
  }
}

XSeries XSeries::classical_image() const {
  XSeries out(var_, caps_);
  out.q_truncated_ = q_truncated_;
  for (const auto& [g2, coeff] : g_) out.add_at(g2, coeff.subst_q_one());
  return out;
}

MultiLaurent XSeries::collapse_x_to_q(std::int64_t k) const {
  require(var_ == Var::X, "collapse_x_to_q applies to x-graded series");
  MultiLaurent out;
  for (const auto& [g2, coeff] : g_) {
    MultiLaurent shifted = coeff.times_monomial(1, q_power4(2 * k * g2));
    if (caps_.q4_max) shifted = truncate_q(shifted, *caps_.q4_max);
    out += shifted;
  }
  return out;
}

MultiLaurent XSeries::flatten() const {
  const std::int64_t dir = (var_ == Var::X) ? 1 : -1;
  MultiLaurent out;
  for (const auto& [g2, coeff] : g_)
    out += coeff.times_monomial(1, x_power2(dir * g2));
  return out;
}

XSeries XSeries::expand_inverse_one_minus(Var var, Caps caps,
                                          const MultiLaurent& mono) {
  require(mono.is_monomial(), "expand_inverse_one_minus needs a monomial");
  const auto& [m, c] = mono.terms()[0];
  const std::int64_t dir = (var == Var::X) ? 1 : -1;
  const std::int64_t grade_step = dir * m.x2;
  require(grade_step > 0 || (m.x2 == 0 && m.q4 > 0),
          "geometric factor must move up the truncation window");
  if (m.x2 == 0)
    require(caps.q4_max.has_value(),
            "q-adic geometric expansion needs a q-cap");
  XSeries out(var, caps);
  Monomial acc{};
  BigInt coeff = 1;
  std::int64_t grade = 0;
  while (grade <= caps.x2_max) {
    if (m.x2 == 0 && acc.q4 > *caps.q4_max) {
      out.mark_q_truncated();
      break;
    }
    Monomial qa = acc;
    qa.x2 = 0;
    out.add_at(grade, MultiLaurent::monomial(coeff, qa));
    acc = acc + m;
    coeff *= c;
    grade += grade_step;
  }
  return out;
}

XSeries XSeries::reciprocal_x_poly(const MultiLaurent& p, Caps caps) {
  auto slices = p.split_by_x();
  require(!slices.empty(), "reciprocal of zero polynomial");
  auto it0 = slices.find(0);
  require(it0 != slices.end() && it0->second.is_one() &&
              slices.begin()->first == 0,
          "reciprocal_x_poly needs constant term 1 and no negative x-powers");
  XSeries out(Var::X, caps);
  std::map<std::int64_t, MultiLaurent> b;  // recurrence coefficients
  b[0] = MultiLaurent::one();
  out.add_at(0, b[0]);
  for (std::int64_t n2 = 1; n2 <= caps.x2_max; ++n2) {
    MultiLaurent acc;
    for (const auto& [k2, ak] : slices) {
      if (k2 == 0 || k2 > n2) continue;
      auto bit = b.find(n2 - k2);
      if (bit == b.end()) continue;
      acc += ak * bit->second;
    }
    if (acc.is_zero()) continue;
    b[n2] = -acc;
    out.add_at(n2, b[n2]);
  }
  return out;
}

}  // namespace fk::algebra
