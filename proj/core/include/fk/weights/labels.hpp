/**
 * @file labels.hpp
 * @brief Strand labels (weight-space coordinates) and their enumeration.
 *
 * A strand of the rank-(N-1) module carries a label of N-1 integers
 * (e_1, ..., e_{N-1}).
 *
 *  - positive type: e_1 >= e_2 >= ... >= e_{N-1} >= 0 (a weakly decreasing
 *    staircase; the zero label is positive type);
 *  - inverted type: all entries negative with strictly decreasing magnitudes,
 *    i.e. e_1 < e_2 < ... < e_{N-1} < 0. Inverted labels only exist for
 *    magnitude |e_1| >= N-1.
 *
 * The "stratum weight" of a tuple of labels is the sum of |e_1| over the
 * tuple; enumeration by stratum drives the truncated state sums.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fk::weights {

struct Label {
  std::vector<std::int32_t> e;  ///< entries, length N-1

  bool operator==(const Label&) const = default;

  int rank_n() const { return static_cast<int>(e.size()) + 1; }
  bool is_zero() const {
    for (auto v : e)
      if (v != 0) return false;
    return true;
  }
  bool inverted() const { return !e.empty() && e[0] < 0; }
  std::int32_t first() const { return e.empty() ? 0 : e[0]; }
  /// |e_1| (the stratum contribution).
  std::int32_t first_magnitude() const {
    return first() < 0 ? -first() : first();
  }
  /// Signed entry sum.
  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto v : e) s += v;
    return s;
  }
  /// Entry by 1-based index i in (1..N-1); i = N yields 0 (the padding the
  /// crossing formulas use).
  std::int64_t at(int i) const {
    if (i >= 1 && i <= static_cast<int>(e.size()))
      return e[static_cast<std::size_t>(i - 1)];
    return 0;
  }

  std::string to_string() const;
};

Label zero_label(int N);

/// Componentwise sum/difference (used for conservation checks).
Label add(const Label& a, const Label& b);

bool is_valid_positive(const Label& l);
bool is_valid_inverted(const Label& l);
/// Either positive staircase or inverted strict staircase.
bool is_valid(const Label& l);

/// All positive labels with e_1 <= max_first, in lexicographic order.
std::vector<Label> enumerate_labels(int N, std::int32_t max_first);

/// All positive labels with e_1 == first (first >= 0).
std::vector<Label> enumerate_labels_with_first(int N, std::int32_t first);

/// All inverted labels with |e_1| == mag (empty unless mag >= N-1).
std::vector<Label> enumerate_inverted_with_first(int N, std::int32_t mag);

/// Visit every tuple of labels over `count` strands whose stratum weight
/// (sum of |e_1|) equals `weight`; strand i is inverted-type when
/// inverted_mask[i] is set. Tuples are visited in a deterministic order.
void for_each_stratum_tuple(int N, int count,
                            const std::vector<bool>& inverted_mask,
                            std::int32_t weight,
                            const std::function<void(const std::vector<Label>&)>& fn);

}  // namespace fk::weights
