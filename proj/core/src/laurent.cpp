#include "fk/algebra/laurent.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace fk::algebra {

void MultiLaurent::normalize_() {
  std::sort(t_.begin(), t_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> out;
  out.reserve(t_.size());
  for (auto& term : t_) {
    if (!out.empty() && out.back().first == term.first) {
      out.back().second += term.second;
      if (out.back().second == 0) out.pop_back();
    } else if (term.second != 0) {
      out.push_back(std::move(term));
    }
  }
  t_ = std::move(out);
}

MultiLaurent MultiLaurent::integer(BigInt c) {
  return monomial(std::move(c), Monomial{});
}

MultiLaurent MultiLaurent::monomial(BigInt c, Monomial m) {
  MultiLaurent p;
  if (c != 0) p.t_.emplace_back(m, std::move(c));
  return p;
}

MultiLaurent MultiLaurent::from_terms(std::vector<Term> terms) {
  MultiLaurent p;
  p.t_ = std::move(terms);
  p.normalize_();
  return p;
}

MultiLaurent MultiLaurent::from_canonical_terms(std::vector<Term> terms) {
  MultiLaurent p;
  p.t_ = std::move(terms);
  return p;
}

bool MultiLaurent::is_one() const {
  return t_.size() == 1 && t_[0].first == Monomial{} && t_[0].second == 1;
}

const MultiLaurent::Term& MultiLaurent::trailing() const {
  require(!t_.empty(), "trailing() on zero polynomial");
  return t_.front();
}

const MultiLaurent::Term& MultiLaurent::leading() const {
  require(!t_.empty(), "leading() on zero polynomial");
  return t_.back();
}

std::optional<std::int64_t> MultiLaurent::min_x2() const {
  if (t_.empty()) return std::nullopt;
  return t_.front().first.x2;  // canonical order sorts by x2 first
}

std::optional<std::int64_t> MultiLaurent::max_x2() const {
  if (t_.empty()) return std::nullopt;
  return t_.back().first.x2;
}

std::optional<std::int64_t> MultiLaurent::min_q4() const {
  if (t_.empty()) return std::nullopt;
  std::int64_t m = t_.front().first.q4;
  for (const auto& [mono, c] : t_) m = std::min(m, mono.q4);
  return m;
}

std::optional<std::int64_t> MultiLaurent::max_q4() const {
  if (t_.empty()) return std::nullopt;
  std::int64_t m = t_.front().first.q4;
  for (const auto& [mono, c] : t_) m = std::max(m, mono.q4);
  return m;
}

bool MultiLaurent::depends_on_x() const {
  for (const auto& [mono, c] : t_)
    if (mono.x2 != 0) return true;
  return false;
}

bool MultiLaurent::depends_on_a() const {
  for (const auto& [mono, c] : t_)
    if (mono.a2 != 0) return true;
  return false;
}

BigInt MultiLaurent::coefficient_of(const Monomial& m) const {
  auto it = std::lower_bound(
      t_.begin(), t_.end(), m,
      [](const Term& t, const Monomial& key) { return t.first < key; });
  if (it != t_.end() && it->first == m) return it->second;
  return 0;
}

MultiLaurent& MultiLaurent::operator+=(const MultiLaurent& o) {
  if (o.t_.empty()) return *this;
  if (t_.empty()) {
    t_ = o.t_;
    return *this;
  }
  // Linear merge of two sorted term lists.
  std::vector<Term> out;
  out.reserve(t_.size() + o.t_.size());
  auto a = t_.begin();
  auto b = o.t_.begin();
  while (a != t_.end() && b != o.t_.end()) {
    if (a->first < b->first) {
      out.push_back(std::move(*a++));
    } else if (b->first < a->first) {
      out.push_back(*b++);
    } else {
      BigInt c = a->second + b->second;
      if (c != 0) out.emplace_back(a->first, std::move(c));
      ++a;
      ++b;
    }
  }
  out.insert(out.end(), std::make_move_iterator(a),
             std::make_move_iterator(t_.end()));
  out.insert(out.end(), b, o.t_.end());
  t_ = std::move(out);
  return *this;
}

MultiLaurent& MultiLaurent::operator-=(const MultiLaurent& o) {
  return *this += -o;
}

MultiLaurent MultiLaurent::operator-() const {
  MultiLaurent p = *this;
  for (auto& [m, c] : p.t_) c = -c;
  return p;
}

MultiLaurent MultiLaurent::times_monomial(const BigInt& c,
                                          const Monomial& m) const {
  if (c == 0) return zero();
  MultiLaurent p = *this;
  for (auto& [mono, coeff] : p.t_) {
    mono = mono + m;
    coeff *= c;
  }
  return p;  // order is translation invariant, terms stay sorted
}

namespace {

/// True when every term of the polynomial carries the same x- and a-exponent,
/// i.e. the polynomial varies only in the q-direction.
bool q_only_shape(const std::vector<MultiLaurent::Term>& t) {
  for (const auto& [m, c] : t)
    if (m.x2 != t.front().first.x2 || m.a2 != t.front().first.a2) return false;
  return true;
}

}  // namespace

MultiLaurent operator*(const MultiLaurent& a, const MultiLaurent& b) {
  if (a.t_.empty() || b.t_.empty()) return MultiLaurent::zero();
  if (b.t_.size() == 1) return a.times_monomial(b.t_[0].second, b.t_[0].first);
  if (a.t_.size() == 1) return b.times_monomial(a.t_[0].second, a.t_[0].first);
  // Fast path: both factors vary only in q.  The product is a plain
  // univariate convolution accumulated into a dense strip, which comes out
  // already sorted and skips the concatenate-and-sort canonicalisation.
  if (q_only_shape(a.t_) && q_only_shape(b.t_)) {
    const std::int64_t alo = a.t_.front().first.q4;
    const std::int64_t blo = b.t_.front().first.q4;
    std::int64_t stride = 0;
    for (const auto& [m, c] : a.t_) stride = std::gcd(stride, m.q4 - alo);
    for (const auto& [m, c] : b.t_) stride = std::gcd(stride, m.q4 - blo);
    if (stride == 0) stride = 1;
    const std::int64_t span = (a.t_.back().first.q4 - alo) / stride +
                              (b.t_.back().first.q4 - blo) / stride;
    // A dense strip only pays off while it stays comparably sized to the
    // term-pair count; degenerate sparse-but-wide factors take the slow path.
    if (span <= (1 << 20) &&
        static_cast<std::uint64_t>(span) <
            16 * a.t_.size() * b.t_.size() + 64) {
      std::vector<BigInt> dense(static_cast<std::size_t>(span + 1));
      for (const auto& [ma, ca] : a.t_) {
        const std::int64_t abase = (ma.q4 - alo) / stride;
        for (const auto& [mb, cb] : b.t_)
          mpz_addmul(dense[static_cast<std::size_t>(
                               abase + (mb.q4 - blo) / stride)]
                         .get_mpz_t(),
                     ca.get_mpz_t(), cb.get_mpz_t());
      }
      const Monomial base{alo + blo,
                          a.t_.front().first.x2 + b.t_.front().first.x2,
                          a.t_.front().first.a2 + b.t_.front().first.a2};
      MultiLaurent p;
      for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] == 0) continue;
        p.t_.emplace_back(
            Monomial{base.q4 + static_cast<std::int64_t>(i) * stride, base.x2,
                     base.a2},
            std::move(dense[i]));
      }
      return p;  // built in ascending q order: already canonical
    }
  }
  // Accumulate the full product then canonicalise once.
  std::vector<MultiLaurent::Term> prod;
  prod.reserve(a.t_.size() * b.t_.size());
  for (const auto& [ma, ca] : a.t_)
    for (const auto& [mb, cb] : b.t_) prod.emplace_back(ma + mb, ca * cb);
  return MultiLaurent::from_terms(std::move(prod));
}

MultiLaurent MultiLaurent::pow(std::uint64_t n) const {
  MultiLaurent result = one();
  MultiLaurent base = *this;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

MultiLaurent MultiLaurent::divide_exact(const BigInt& c) const {
  require(c != 0, "division by zero integer");
  MultiLaurent p = *this;
  for (auto& [m, coeff] : p.t_) {
    if (!mpz_divisible_p(coeff.get_mpz_t(), c.get_mpz_t()))
      raise(ErrorCode::NonIntegralEvaluation,
            "coefficient not divisible in exact integer division");
    coeff /= c;
  }
  return p;
}

MultiLaurent MultiLaurent::divide_exact(const MultiLaurent& divisor) const {
  if (divisor.is_zero())
    raise(ErrorCode::NonIntegralEvaluation, "division by zero polynomial");
  if (is_zero()) return zero();
  if (divisor.is_monomial()) {
    const auto& [dm, dc] = divisor.t_[0];
    MultiLaurent p = *this;
    for (auto& [m, coeff] : p.t_) {
      m = m - dm;
      if (!mpz_divisible_p(coeff.get_mpz_t(), dc.get_mpz_t()))
        raise(ErrorCode::NonIntegralEvaluation,
              "coefficient not divisible by monomial divisor");
      coeff /= dc;
    }
    return p;
  }

  // Fast path: a two-term divisor moving only in q, with unit lower
  // coefficient, against a dividend that also moves only in q.  The quotient
  // then satisfies a first-order recurrence along a dense q-strip, with
  // exactness certified by the top slots of the strip coming out zero.
  if (divisor.t_.size() == 2 && q_only_shape(t_) &&
      divisor.t_[0].first.x2 == divisor.t_[1].first.x2 &&
      divisor.t_[0].first.a2 == divisor.t_[1].first.a2 &&
      (divisor.t_[0].second == 1 || divisor.t_[0].second == -1)) {
    const Monomial d0 = divisor.t_[0].first;  // lower term in canonical order
    const std::int64_t gap = divisor.t_[1].first.q4 - d0.q4;
    const std::int64_t plo = t_.front().first.q4;
    std::int64_t stride = gap;
    for (const auto& [m, c] : t_) stride = std::gcd(stride, m.q4 - plo);
    const std::int64_t span = (t_.back().first.q4 - plo) / stride;
    if (span <= (std::int64_t{1} << 22)) {
      const std::int64_t s = gap / stride;
      const bool neg0 = divisor.t_[0].second == -1;
      const BigInt& c1 = divisor.t_[1].second;
      std::vector<BigInt> q(static_cast<std::size_t>(span + 1));
      auto pit = t_.begin();
      bool exact = true;
      for (std::int64_t i = 0; i <= span; ++i) {
        BigInt& qi = q[static_cast<std::size_t>(i)];
        if (pit != t_.end() && (pit->first.q4 - plo) / stride == i)
          qi = (pit++)->second;
        if (i >= s)
          mpz_submul(qi.get_mpz_t(), c1.get_mpz_t(),
                     q[static_cast<std::size_t>(i - s)].get_mpz_t());
        if (neg0) qi = -qi;
        if (i > span - s && qi != 0) {
          exact = false;  // quotient support would overrun the dividend
          break;
        }
      }
      if (!exact)
        raise(ErrorCode::NonIntegralEvaluation,
              "two-term division leaves a remainder: not an exact divisor");
      std::vector<Term> qt;
      const Monomial base{plo - d0.q4, t_.front().first.x2 - d0.x2,
                          t_.front().first.a2 - d0.a2};
      for (std::int64_t i = 0; i + s <= span; ++i) {
        if (q[static_cast<std::size_t>(i)] == 0) continue;
        qt.emplace_back(Monomial{base.q4 + i * stride, base.x2, base.a2},
                        std::move(q[static_cast<std::size_t>(i)]));
      }
      return from_canonical_terms(std::move(qt));
    }
  }

  // Long division by leading terms in the canonical (lex) monomial order.
  // Laurent monomials are all invertible, so work relative to the divisor's
  // leading term and verify exactness at the end by re-multiplication.
  MultiLaurent remainder = *this;
  std::vector<Term> quotient_terms;
  const Term& dlead = divisor.leading();
  // Generous iteration guard: exact quotients in this engine are small.
  std::size_t guard = 4 * t_.size() * divisor.t_.size() + 1024;
  while (!remainder.is_zero()) {
    if (quotient_terms.size() > guard || remainder.t_.size() > 8 * guard)
      raise(ErrorCode::NonIntegralEvaluation,
            "polynomial division does not terminate: not an exact divisor");
    const Term& rlead = remainder.leading();
    if (!mpz_divisible_p(rlead.second.get_mpz_t(), dlead.second.get_mpz_t()))
      raise(ErrorCode::NonIntegralEvaluation,
            "leading coefficient not divisible: not an exact divisor");
    Monomial qm = rlead.first - dlead.first;
    BigInt qc = rlead.second / dlead.second;
    quotient_terms.emplace_back(qm, qc);
    remainder -= divisor.times_monomial(qc, qm);
  }
  MultiLaurent quotient = from_terms(std::move(quotient_terms));
  require(quotient * divisor == *this, "exact division verification failed");
  return quotient;
}

MultiLaurent MultiLaurent::subst_q_inverse() const {
  std::vector<Term> terms = t_;
  for (auto& [m, c] : terms) m.q4 = -m.q4;
  return from_terms(std::move(terms));
}

MultiLaurent MultiLaurent::subst_x_inverse() const {
  std::vector<Term> terms = t_;
  for (auto& [m, c] : terms) m.x2 = -m.x2;
  return from_terms(std::move(terms));
}

MultiLaurent MultiLaurent::subst_x_q_int(std::int64_t k) const {
  std::vector<Term> terms = t_;
  for (auto& [m, c] : terms) {
    m.q4 += 2 * k * m.x2;  // x-power x2/2 becomes q-power k*x2/2
    m.x2 = 0;
  }
  return from_terms(std::move(terms));
}

MultiLaurent MultiLaurent::subst_a_q_int(std::int64_t k) const {
  std::vector<Term> terms = t_;
  for (auto& [m, c] : terms) {
    m.q4 += 2 * k * m.a2;
    m.a2 = 0;
  }
  return from_terms(std::move(terms));
}

MultiLaurent MultiLaurent::subst_q_one() const {
  std::vector<Term> terms = t_;
  for (auto& [m, c] : terms) m.q4 = 0;
  return from_terms(std::move(terms));
}

MultiLaurent MultiLaurent::subst_x_one() const {
  std::vector<Term> terms = t_;
  for (auto& [m, c] : terms) m.x2 = 0;
  return from_terms(std::move(terms));
}

std::map<std::int64_t, MultiLaurent> MultiLaurent::split_by_x() const {
  std::map<std::int64_t, MultiLaurent> out;
  for (const auto& [m, c] : t_) {
    Monomial stripped = m;
    stripped.x2 = 0;
    out[m.x2] += monomial(c, stripped);
  }
  return out;
}

namespace {

void append_var(std::ostringstream& os, bool& first_factor, const char* name,
                std::int64_t num, std::int64_t den) {
  if (num == 0) return;
  if (!first_factor) os << "*";
  first_factor = false;
  os << name;
  if (num == den) return;  // exponent 1
  while (den > 1 && num % 2 == 0) {
    num /= 2;
    den /= 2;
  }
  os << "^";
  if (den == 1) {
    if (num < 0)
      os << "{" << num << "}";
    else
      os << num;
  } else {
    os << "{" << num << "/" << den << "}";
  }
}

}  // namespace

std::string term_to_string(const BigInt& c, const Monomial& m,
                           bool render_x_as_t) {
  std::ostringstream os;
  bool first_factor = true;
  BigInt mag = abs(c);
  bool has_vars = (m.q4 != 0 || m.x2 != 0 || m.a2 != 0);
  if (mag != 1 || !has_vars) {
    os << mag.get_str();
    first_factor = false;
  }
  append_var(os, first_factor, "q", m.q4, 4);
  append_var(os, first_factor, render_x_as_t ? "t" : "x", m.x2, 2);
  append_var(os, first_factor, "a", m.a2, 2);
  return os.str();
}

std::string MultiLaurent::to_string(bool render_x_as_t) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : t_) {
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << term_to_string(c, m, render_x_as_t);
  }
  return os.str();
}

}  // namespace fk::algebra
