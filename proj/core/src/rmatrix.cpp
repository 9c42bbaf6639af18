#include "fk/rmatrix/rmatrix.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <mutex>

#include "fk/algebra/qfunc.hpp"
#include "fk/errors.hpp"

namespace fk::rmatrix {
namespace {

using algebra::Monomial;
using algebra::pochhammer;
using algebra::qq_pochhammer;

// Upper-triangular grid of nonnegative integers r_u^v, 1 <= u <= v <= N-1,
// stored column-major (column v holds rows 1..v).
struct Grid {
  int n;  // rank N; the grid has (N-1)N/2 entries
  std::vector<std::int64_t> e;

  explicit Grid(int N) : n(N), e(static_cast<std::size_t>((N - 1) * N / 2)) {}

  std::int64_t& at(int u, int v) {
    return e[static_cast<std::size_t>((v - 1) * v / 2 + (u - 1))];
  }
  std::int64_t at(int u, int v) const {
    return e[static_cast<std::size_t>((v - 1) * v / 2 + (u - 1))];
  }

  /// Sum over rows u1..u2, columns v1..v2 (only entries with u <= v exist;
  /// callers stay inside the triangle). Empty ranges sum to zero.
  std::int64_t block(int u1, int u2, int v1, int v2) const {
    std::int64_t s = 0;
    for (int u = u1; u <= u2; ++u)
      for (int v = std::max(v1, u); v <= v2; ++v) s += at(u, v);
    return s;
  }

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto v : e) s += v;
    return s;
  }
};

/// Four times the q-exponent of one grid term of the positive-crossing
/// element: elements above rank two genuinely carry quarter powers of q, so
/// this integer is used directly as the monomial's q4 field.
std::int64_t four_times_exponent(int N, const Label& a, const Label& b,
                                 const Grid& r) {
  std::int64_t four = 0;
  for (auto v : r.e) four += 2 * v * v;
  // Tridiagonal pairing 4 a.M.b with M = 1 on, -1/2 off the diagonal.
  for (int i = 1; i <= N - 1; ++i) four += 4 * a.at(i) * b.at(i);
  for (int i = 1; i <= N - 2; ++i)
    four -= 2 * (a.at(i) * b.at(i + 1) + a.at(i + 1) * b.at(i));
  for (int j = 1; j <= N - 1; ++j) {
    const std::int64_t col = r.block(1, j, j, j);
    four += col * (a.at(j + 1) + b.at(j + 1) - 2);
    for (int i = 2; i <= j; ++i)
      four -= r.at(i, j) * (a.at(i - 1) + b.at(i - 1));
    for (int i = 1; i <= j; ++i)
      four += r.at(i, j) * (4 * r.block(i + 1, j, j, N - 1) +
                            3 * (a.at(i) - a.at(j)) - (b.at(i) - b.at(j)));
  }
  return four;
}

/// One grid term of the positive-crossing element (already divided by the
/// (q; q) factors of its entries; exactness is verified by the division).
MultiLaurent grid_term(int N, const Label& a, const Label& b, const Grid& r) {
  const std::int64_t row1 = r.block(1, 1, 1, N - 1);

  MultiLaurent numer =
      pochhammer(MultiLaurent::monomial(1, Monomial{-4 * b.at(1), 2, 0}), -4,
                 row1);
  if (numer.is_zero()) return numer;
  {
    const std::int64_t row2 = N >= 3 ? r.block(2, 2, 2, N - 1) : 0;
    numer = numer * pochhammer(
                        MultiLaurent::monomial(
                            1, Monomial{4 * (a.at(1) - a.at(2) + row2), 0, 0}),
                        -4, r.block(1, 1, 1, 1));
    if (numer.is_zero()) return numer;
  }
  for (int j = 2; j <= N - 1; ++j) {
    const std::int64_t rowj = r.block(j, j, j, N - 1);
    const std::int64_t rownext = j + 1 <= N - 1 ? r.block(j + 1, j + 1, j + 1, N - 1) : 0;
    numer = numer *
            pochhammer(MultiLaurent::monomial(
                           1, Monomial{4 * (b.at(j - 1) - b.at(j)), 0, 0}),
                       -4, rowj) *
            pochhammer(MultiLaurent::monomial(
                           1, Monomial{4 * (a.at(j) - a.at(j + 1) + rownext), 0, 0}),
                       -4, r.block(1, j, j, j));
    if (numer.is_zero()) return numer;
  }

  const std::int64_t four = four_times_exponent(N, a, b, r);
  const int sign = r.total() % 2 == 0 ? 1 : -1;
  const Monomial pre{four, -(a.at(1) + b.at(1) + row1), 0};
  MultiLaurent term = numer.times_monomial(sign, pre);

  MultiLaurent denom = MultiLaurent::one();
  for (auto v : r.e) denom = denom * qq_pochhammer(v);
  return term.divide_exact(denom);
}

void check_rank(int N, const Label& a, const Label& b, const Label& ap,
                const Label& bp) {
  require(N >= 2 && N <= 12, "rank out of supported range");
  require(a.rank_n() == N && b.rank_n() == N && ap.rank_n() == N &&
              bp.rank_n() == N,
          "label rank mismatch");
}

bool conserves(int N, const Label& a, const Label& b, const Label& ap,
               const Label& bp) {
  for (int i = 1; i <= N - 1; ++i)
    if (a.at(i) + b.at(i) != ap.at(i) + bp.at(i)) return false;
  return true;
}

}  // namespace

MultiLaurent r_element(int N, const Label& a, const Label& b, const Label& ap,
                       const Label& bp) {
  check_rank(N, a, b, ap, bp);
  require(weights::is_valid_positive(a) && weights::is_valid_positive(b) &&
              weights::is_valid_positive(ap) && weights::is_valid_positive(bp),
          "positive-crossing elements take staircase labels");
  if (!conserves(N, a, b, ap, bp)) return MultiLaurent::zero();

  // Hook sums fixed by the labels; all must be nonnegative.
  std::vector<std::int64_t> hooks(static_cast<std::size_t>(N), 0);
  for (int i = 1; i <= N - 1; ++i) {
    hooks[static_cast<std::size_t>(i)] = a.at(i) - bp.at(i);
    if (hooks[static_cast<std::size_t>(i)] < 0) return MultiLaurent::zero();
  }

  // Enumerate grids: entries in columns 1..N-2 are free subject to the hook
  // budgets; column N-1 is then forced by prefix differences.
  MultiLaurent sum = MultiLaurent::zero();
  Grid grid(N);
  std::vector<std::int64_t> rem(hooks);  // rem[i]: hook-i budget left

  const std::function<void(int, int)> descend = [&](int u, int v) {
    if (v > N - 2) {
      // Hook i needs prefix sums  sum_{w <= i} r_w^{N-1} = rem[i], so the
      // forced entries are the consecutive differences; they must all be
      // nonnegative.
      for (int i = 1; i <= N - 1; ++i) {
        const std::int64_t forced =
            rem[static_cast<std::size_t>(i)] -
            (i > 1 ? rem[static_cast<std::size_t>(i - 1)] : 0);
        if (forced < 0) return;
        grid.at(i, N - 1) = forced;
      }
      sum += grid_term(N, a, b, grid);
      return;
    }
    const int nu = u < v ? u + 1 : 1;
    const int nv = u < v ? v : v + 1;
    std::int64_t bound = rem[static_cast<std::size_t>(u)];
    for (int i = u + 1; i <= v; ++i)
      bound = std::min(bound, rem[static_cast<std::size_t>(i)]);
    for (std::int64_t t = 0; t <= bound; ++t) {
      grid.at(u, v) = t;
      for (int i = u; i <= v; ++i) rem[static_cast<std::size_t>(i)] -= t;
      descend(nu, nv);
      for (int i = u; i <= v; ++i) rem[static_cast<std::size_t>(i)] += t;
    }
    grid.at(u, v) = 0;
  };
  descend(1, 1);

  if (!sum.is_zero()) {
    require(*sum.min_x2() >= -(a.at(1) + ap.at(1)) &&
                *sum.max_x2() <= -(b.at(1) + bp.at(1)),
            "element escaped its x-window");
  }
  return sum;
}

MultiLaurent r_inverse_element(int N, const Label& a, const Label& b,
                               const Label& ap, const Label& bp) {
  return r_element(N, b, a, bp, ap).subst_x_inverse().subst_q_inverse();
}

MultiLaurent classical_r_element(int N, bool inverse, const Label& a,
                                 const Label& b, const Label& ap,
                                 const Label& bp) {
  if (inverse)
    return classical_r_element(N, false, b, a, bp, ap).subst_x_inverse();
  check_rank(N, a, b, ap, bp);
  if (!conserves(N, a, b, ap, bp)) return MultiLaurent::zero();

  // Per consecutive-difference coordinates c_i = a_i - a_{i+1},
  // d'_i = b'_i - b'_{i+1}: the element factors into rank-2 pieces
  //   (-1)^{c-d'} x^{-(2c + d - d')/2} (1-x)^{c-d'} C(c, d').
  BigInt binoms = 1;
  std::int64_t drop = 0;  // sum of c_i - d'_i
  std::int64_t x2 = 0;
  for (int i = 1; i <= N - 1; ++i) {
    const std::int64_t c = a.at(i) - a.at(i + 1);
    const std::int64_t d = b.at(i) - b.at(i + 1);
    const std::int64_t dp = bp.at(i) - bp.at(i + 1);
    if (dp > c || dp < 0 || c < 0) return MultiLaurent::zero();
    binoms *= algebra::binomial_int(c, dp);
    drop += c - dp;
    x2 -= 2 * c + d - dp;
  }
  if (binoms == 0) return MultiLaurent::zero();

  const MultiLaurent one_minus_x =
      MultiLaurent::one() - MultiLaurent::monomial(1, Monomial{0, 2, 0});
  const int sign = drop % 2 == 0 ? 1 : -1;
  return one_minus_x.pow(static_cast<std::uint64_t>(drop))
      .times_monomial(sign * binoms, Monomial{0, x2, 0});
}

MultiLaurent trace_weight(int N, const Label& l) {
  return MultiLaurent::monomial(1, Monomial{-4 * l.total(), N - 1, 0});
}

MultiLaurent framing_monomial(int N, int crossing_sign) {
  require(crossing_sign == 1 || crossing_sign == -1, "crossing sign is +-1");
  return MultiLaurent::monomial(1, Monomial{0, -crossing_sign * (N - 1), 0});
}

MultiLaurent quantum_dimension(int N, std::int64_t k) {
  require(N >= 2 && k >= 0, "quantum dimension needs N >= 2, k >= 0");
  const MultiLaurent numer = pochhammer(
      MultiLaurent::monomial(1, Monomial{4 * (k + 1), 0, 0}), 4, N - 1);
  return numer.divide_exact(qq_pochhammer(N - 1))
      .times_monomial(1, Monomial{-2 * (N - 1) * k, 0, 0});
}

std::vector<std::pair<Label, Label>> crossing_outputs(int N, const Label& a,
                                                      const Label& b,
                                                      bool inverse) {
  check_rank(N, a, b, a, b);
  // Positive crossings move hook sums from a into b' (a'_i = b_i + g_i,
  // b'_i = a_i - g_i); inverse crossings transport the roles.
  const Label& donor = inverse ? b : a;
  std::vector<std::pair<Label, Label>> out;
  std::vector<std::int64_t> g(static_cast<std::size_t>(N - 1), 0);
  const std::function<void(int)> descend = [&](int i) {
    if (i == N - 1) {
      Label ap = a, bp = b;
      for (int j = 1; j <= N - 1; ++j) {
        const auto gj = g[static_cast<std::size_t>(j - 1)];
        ap.e[static_cast<std::size_t>(j - 1)] =
            static_cast<std::int32_t>(b.at(j) + (inverse ? -gj : gj));
        bp.e[static_cast<std::size_t>(j - 1)] =
            static_cast<std::int32_t>(a.at(j) + (inverse ? gj : -gj));
      }
      if (weights::is_valid_positive(ap) && weights::is_valid_positive(bp))
        out.emplace_back(std::move(ap), std::move(bp));
      return;
    }
    for (std::int64_t t = 0; t <= donor.at(i + 1); ++t) {
      g[static_cast<std::size_t>(i)] = t;
      descend(i + 1);
    }
    g[static_cast<std::size_t>(i)] = 0;
  };
  descend(0);
  return out;
}

const MultiLaurent& ElementStore::fetch(std::map<PolyKey, MultiLaurent>& cache,
                                        PolyKey key, const Label& a,
                                        const Label& b, const Label& ap,
                                        const Label& bp, int N, int kind) {
  {
    std::shared_lock lock(mu_);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  MultiLaurent value;
  switch (kind) {
    case 0: value = r_element(N, a, b, ap, bp); break;
    case 1: value = r_inverse_element(N, a, b, ap, bp); break;
    case 2: value = classical_r_element(N, false, a, b, ap, bp); break;
    default: value = classical_r_element(N, true, a, b, ap, bp); break;
  }
  std::unique_lock lock(mu_);
  return cache.try_emplace(std::move(key), std::move(value)).first->second;
}

namespace {
std::vector<std::int64_t> poly_key(int N, int kind, const Label& a,
                                   const Label& b, const Label& ap,
                                   const Label& bp) {
  std::vector<std::int64_t> key{N, kind};
  for (const Label* l : {&a, &b, &ap, &bp})
    for (auto e : l->e) key.push_back(e);
  return key;
}
}  // namespace

const MultiLaurent& ElementStore::positive(int N, const Label& a,
                                           const Label& b, const Label& ap,
                                           const Label& bp) {
  return fetch(poly_, poly_key(N, 0, a, b, ap, bp), a, b, ap, bp, N, 0);
}

const MultiLaurent& ElementStore::inverse(int N, const Label& a,
                                          const Label& b, const Label& ap,
                                          const Label& bp) {
  return fetch(poly_, poly_key(N, 1, a, b, ap, bp), a, b, ap, bp, N, 1);
}

const MultiLaurent& ElementStore::classical(int N, bool inverse,
                                            const Label& a, const Label& b,
                                            const Label& ap, const Label& bp) {
  const int kind = inverse ? 3 : 2;
  return fetch(poly_, poly_key(N, kind, a, b, ap, bp), a, b, ap, bp, N, kind);
}

namespace {

/// Exact restriction of a wider-window element to the requested window: the
/// series is grade-local and ascending in q, so dropping high grades and high
/// q-powers reproduces a direct computation at the narrow window.
XSeries restrict_series(const XSeries& wide, const Caps& caps) {
  XSeries out(XSeries::Var::U, caps);
  for (const auto& [g2, c] : wide.grades()) out.add_at(g2, c);
  if (caps.q4_max) out.q_truncate(*caps.q4_max);
  if (wide.q_truncated()) out.mark_q_truncated();
  return out;
}

}  // namespace

const XSeries& ElementStore::inverse_inverted(int N, const Label& a,
                                              const Label& b, const Label& ap,
                                              const Label& bp,
                                              const Caps& caps) {
  require(caps.q4_max.has_value(),
          "inverted elements are ascending q-series; set a q window");
  PolyKey key = poly_key(N, 4, a, b, ap, bp);
  PolyKey master_key = key;
  key.push_back(caps.x2_max);
  key.push_back(*caps.q4_max);
  {
    std::shared_lock lock(mu_);
    auto it = series_.find(key);
    if (it != series_.end()) return it->second;
  }

  // Compute (or widen) the label tuple's master window, then serve the
  // request as a truncation of it. A replacement master must subsume the
  // incumbent so concurrent widening never shrinks coverage.
  const auto subsumes = [](const Caps& big, const Caps& small) {
    return big.x2_max >= small.x2_max && *big.q4_max >= *small.q4_max;
  };
  for (;;) {
    Caps have{std::numeric_limits<std::int64_t>::min(),
              std::numeric_limits<std::int64_t>::min()};
    bool present = false;
    {
      std::shared_lock lock(mu_);
      auto it = master_.find(master_key);
      if (it != master_.end()) {
        have = it->second.caps();
        present = true;
      }
    }
    if (present && subsumes(have, caps)) break;
    const Caps widened{std::max(have.x2_max, caps.x2_max),
                       std::max(present ? *have.q4_max
                                        : std::numeric_limits<std::int64_t>::min(),
                                *caps.q4_max)};
    XSeries master = r_inverse_inverted(N, a, b, ap, bp, widened);
    std::unique_lock lock(mu_);
    auto it = master_.find(master_key);
    if (it == master_.end() || subsumes(widened, it->second.caps())) {
      master_.insert_or_assign(master_key, std::move(master));
      break;
    }
    // Raced against a master this computation does not cover: retry against
    // the new incumbent.
  }

  XSeries value(XSeries::Var::U, caps);
  {
    std::shared_lock lock(mu_);
    value = restrict_series(master_.at(master_key), caps);
  }
  std::unique_lock wlock(mu_);
  return series_.try_emplace(std::move(key), std::move(value)).first->second;
}

}  // namespace fk::rmatrix
