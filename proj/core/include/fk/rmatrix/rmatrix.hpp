/**
 * @file rmatrix.hpp
 * @brief Crossing weights on the large-colour symmetric module.
 *
 * A crossing between two strands labelled (a, b) maps to labels (a', b')
 * subject to entrywise conservation a + b = a' + b'. The weight of the
 * transition ("element") is an exact Laurent polynomial in q^{1/2}, x^{1/2}
 * for staircase (positive-type) labels. All elements here are *bare*: the
 * per-crossing monomial x^{-sign (N-1)/2} that keeps the closure in framing
 * zero is applied by the state-sum layer via framing_monomial().
 *
 * Conventions:
 *  - positive crossing, bare element  r_element(N, a, b, a', b');
 *  - inverse crossing, bare element   r_inverse_element = transported image
 *      of r_element under (a<->b, a'<->b', x -> 1/x, q -> 1/q);
 *  - hook sums g_i = a_i - b'_i = a'_i - b_i must all be >= 0, otherwise the
 *    element vanishes;
 *  - every nonzero element lives in the x-window
 *      [-(a_1 + a'_1)/2, -(b_1 + b'_1)/2].
 *
 * Inverse crossings additionally accept *inverted* labels (all entries
 * negative, strictly increasing) in the b/b' slots; those elements are
 * graded series in u = x^{-1} rather than polynomials and are provided for
 * ranks N = 2, 3 via closed forms.
 */
#pragma once

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "fk/algebra/laurent.hpp"
#include "fk/algebra/series.hpp"
#include "fk/weights/labels.hpp"

namespace fk::rmatrix {

using algebra::Caps;
using algebra::MultiLaurent;
using algebra::XSeries;
using weights::Label;

/// Bare positive-crossing element for staircase labels of rank N.
/// Total in its arguments: returns zero on conservation/hook failure.
MultiLaurent r_element(int N, const Label& a, const Label& b, const Label& ap,
                       const Label& bp);

/// Bare inverse-crossing element for staircase labels (transported image of
/// r_element; a polynomial in x^{1/2}, q^{1/2} and their inverses).
MultiLaurent r_inverse_element(int N, const Label& a, const Label& b,
                               const Label& ap, const Label& bp);

/// q -> 1 limit of the bare elements (inverse = true transports).
MultiLaurent classical_r_element(int N, bool inverse, const Label& a,
                                 const Label& b, const Label& ap,
                                 const Label& bp);

/// Rank-2 inverse element in closed form for nonnegative labels. Agrees with
/// r_inverse_element(2, ...) everywhere; kept as an independent pinning of
/// the closed form the inverted-label route extends.
MultiLaurent r_inverse_rank2_closed(std::int64_t a, std::int64_t b,
                                    std::int64_t ap, std::int64_t bp);

/// How the mixed label product in the rank-3 closed-form exponent contracts
/// its two label vectors. The three contraction candidates are kept so tests
/// can demonstrate they disagree with the transported elements; Calibrated is
/// the reading solved exactly against those elements and is the one the
/// engine uses.
enum class ExponentReading {
  VectorDot,   ///< sum_i (b_i - a'_i)(b'_i + a'_i - 1)
  FirstEntry,  ///< (b_1 - a'_1)(b'_1 + a'_1 - 1)
  EntrySums,   ///< (|b| - |a'|)(|b'| + |a'| - 1)
  Calibrated,  ///< (a'_1 - b_1)(a_1 + b'_1 - 1)   (matches transport exactly)
};

/// Rank-3 inverse element in closed form for nonnegative labels; agrees with
/// r_inverse_element(3, ...) under the Calibrated reading.
MultiLaurent r_inverse_rank3_closed(const Label& a, const Label& b,
                                    const Label& ap, const Label& bp,
                                    ExponentReading reading = ExponentReading::Calibrated);

/// Inverse element with inverted b, b' (and staircase a, a'), as a graded
/// series in u = x^{-1} within the window. Rank 2 results are exact per
/// grade; rank 3 results are ascending q-series truncated at the q-cap
/// (which must be present). Other ranks raise UnsupportedRank.
XSeries r_inverse_inverted(int N, const Label& a, const Label& b,
                           const Label& ap, const Label& bp, const Caps& caps);

/// Closure weight of a traced strand: x^{(N-1)/2} q^{-|l|}.
MultiLaurent trace_weight(int N, const Label& l);

/// Framing-zero correction per crossing: x^{-sign (N-1)/2}, sign = +-1.
MultiLaurent framing_monomial(int N, int crossing_sign);

/// Quantum dimension of the k-th symmetric colour:
/// q^{-(N-1)k/2} (q^{k+1}; q)_{N-1} / (q; q)_{N-1}.
MultiLaurent quantum_dimension(int N, std::int64_t k);

/// All out-label pairs (a', b') with valid staircases and nonnegative hooks
/// for the given staircase in-labels; inverse = true uses the transported
/// hook direction. Every nonzero element is reachable through this list.
std::vector<std::pair<Label, Label>> crossing_outputs(int N, const Label& a,
                                                      const Label& b,
                                                      bool inverse);

/// Thread-safe memo for crossing elements. References stay valid for the
/// lifetime of the store (entries are never evicted).
class ElementStore {
 public:
  const MultiLaurent& positive(int N, const Label& a, const Label& b,
                               const Label& ap, const Label& bp);
  const MultiLaurent& inverse(int N, const Label& a, const Label& b,
                              const Label& ap, const Label& bp);
  /// Inverted-label inverse elements, keyed by window as well as labels.
  const XSeries& inverse_inverted(int N, const Label& a, const Label& b,
                                  const Label& ap, const Label& bp,
                                  const Caps& caps);
  /// q -> 1 limits (inverse = transported), cached like the quantum ones.
  const MultiLaurent& classical(int N, bool inverse, const Label& a,
                                const Label& b, const Label& ap,
                                const Label& bp);

 private:
  using PolyKey = std::vector<std::int64_t>;
  const MultiLaurent& fetch(std::map<PolyKey, MultiLaurent>& cache,
                            PolyKey key, const Label& a, const Label& b,
                            const Label& ap, const Label& bp, int N, int kind);

  std::map<PolyKey, MultiLaurent> poly_;
  std::map<PolyKey, XSeries> series_;
  // Widest window computed so far per label tuple; narrower requests are
  // served by truncating the master instead of recomputing.
  std::map<PolyKey, XSeries> master_;
  std::shared_mutex mu_;
};

}  // namespace fk::rmatrix
