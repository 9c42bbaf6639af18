// Strand labels: validity, enumeration counts, and stratum tuple generation.

#include <gtest/gtest.h>

#include <set>

#include "fk/weights/labels.hpp"

namespace {

using fk::weights::enumerate_inverted_with_first;
using fk::weights::enumerate_labels;
using fk::weights::enumerate_labels_with_first;
using fk::weights::for_each_stratum_tuple;
using fk::weights::is_valid_inverted;
using fk::weights::is_valid_positive;
using fk::weights::Label;
using fk::weights::zero_label;

TEST(Labels, ValidityRules) {
  EXPECT_TRUE(is_valid_positive(Label{{3, 1, 0}}));
  EXPECT_TRUE(is_valid_positive(zero_label(4)));
  EXPECT_FALSE(is_valid_positive(Label{{1, 2}}));    // increasing
  EXPECT_FALSE(is_valid_positive(Label{{1, -1}}));   // negative entry
  EXPECT_TRUE(is_valid_inverted(Label{{-3, -1}}));   // magnitudes 3 > 1
  EXPECT_FALSE(is_valid_inverted(Label{{-1, -1}}));  // magnitudes equal
  EXPECT_FALSE(is_valid_inverted(Label{{-1, -2}}));  // magnitudes increasing
  EXPECT_FALSE(is_valid_inverted(Label{{-1, 0}}));   // zero entry
}

TEST(Labels, EntryAccessPadsWithZeros) {
  const Label l{{4, 2}};
  EXPECT_EQ(l.rank_n(), 3);
  EXPECT_EQ(l.at(1), 4);
  EXPECT_EQ(l.at(2), 2);
  EXPECT_EQ(l.at(3), 0);  // labels act as if padded by e_N = 0
  EXPECT_EQ(l.total(), 6);
  EXPECT_FALSE(l.inverted());
  EXPECT_TRUE((Label{{-2, -1}}.inverted()));
}

// Rank 3: staircases with first entry exactly k are pairs (k, j), 0 <= j <= k,
// so the cumulative count up to first entry k is the triangular number.
TEST(LabelEnumeration, RankThreeCounts) {
  const int expected_cumulative[] = {1, 3, 6, 10, 15, 21};
  for (int k = 0; k <= 5; ++k) {
    SCOPED_TRACE(k);
    EXPECT_EQ(enumerate_labels(3, k).size(),
              static_cast<std::size_t>(expected_cumulative[k]));
    EXPECT_EQ(enumerate_labels_with_first(3, k).size(),
              static_cast<std::size_t>(k + 1));
  }
}

TEST(LabelEnumeration, RankTwoIsLinear) {
  const auto all = enumerate_labels(2, 7);
  ASSERT_EQ(all.size(), 8u);
  for (int k = 0; k <= 7; ++k) EXPECT_EQ(all[static_cast<std::size_t>(k)].first(), k);
}

TEST(LabelEnumeration, EverythingEnumeratedIsValidAndUnique) {
  const auto all = enumerate_labels(4, 4);
  std::set<std::vector<std::int32_t>> seen;
  for (const auto& l : all) {
    EXPECT_TRUE(is_valid_positive(l)) << l.to_string();
    EXPECT_TRUE(seen.insert(l.e).second) << l.to_string();
  }
  // Rank-4 staircases with first entry <= 1: (0,0,0), (1,0,0), (1,1,0), (1,1,1).
  EXPECT_EQ(enumerate_labels(4, 1).size(), 4u);
}

TEST(LabelEnumeration, InvertedRequiresDeepMagnitude) {
  // Rank 2: a single negative entry of the requested magnitude.
  EXPECT_EQ(enumerate_inverted_with_first(2, 1).size(), 1u);
  EXPECT_EQ(enumerate_inverted_with_first(2, 1)[0], (Label{{-1}}));

  // Rank 3: first magnitude m pairs with any strictly smaller magnitude.
  EXPECT_TRUE(enumerate_inverted_with_first(3, 1).empty());
  const auto m3 = enumerate_inverted_with_first(3, 3);
  ASSERT_EQ(m3.size(), 2u);
  EXPECT_EQ(m3[0], (Label{{-3, -2}}));
  EXPECT_EQ(m3[1], (Label{{-3, -1}}));
  for (const auto& l : m3) EXPECT_TRUE(is_valid_inverted(l));
}

TEST(StratumTuples, WeightsAndMasksRespected) {
  // Two positive slots at total first-entry weight 2: (0,2),(1,1),(2,0) label
  // shapes expanded over rank-3 staircases with those first entries.
  int count = 0;
  std::int64_t weight_checks = 0;
  for_each_stratum_tuple(3, 2, /*inverted_mask=*/{false, false}, /*weight=*/2,
                         [&](const std::vector<Label>& tuple) {
                           ASSERT_EQ(tuple.size(), 2u);
                           weight_checks += tuple[0].first_magnitude() +
                                            tuple[1].first_magnitude();
                           ++count;
                         });
  // first entries (0,2): 1*3 shapes; (1,1): 2*2; (2,0): 3*1 -> 10 tuples.
  EXPECT_EQ(count, 10);
  EXPECT_EQ(weight_checks, 2 * count);

  // One slot inverted (mask bit 0): rank 2 so magnitudes are the first entries.
  std::vector<std::pair<int, int>> pairs;
  for_each_stratum_tuple(2, 2, /*inverted_mask=*/{true, false}, /*weight=*/3,
                         [&](const std::vector<Label>& tuple) {
                           pairs.emplace_back(tuple[0].first(),
                                              tuple[1].first());
                         });
  // Inverted slot carries -m with m >= 1 (never zero), the other m' >= 0.
  const std::vector<std::pair<int, int>> want = {{-1, 2}, {-2, 1}, {-3, 0}};
  EXPECT_EQ(pairs, want);
}

TEST(StratumTuples, ZeroWeightIsTheAllZeroTuple) {
  int count = 0;
  for_each_stratum_tuple(3, 3, {false, false, false}, 0, [&](const std::vector<Label>& tuple) {
    for (const auto& l : tuple) EXPECT_TRUE(l.is_zero());
    ++count;
  });
  EXPECT_EQ(count, 1);

  // A required inverted slot cannot carry weight zero.
  for_each_stratum_tuple(3, 1, {true}, 0,
                         [&](const std::vector<Label>&) { FAIL(); });
  // Rank 3 inverted labels need magnitude >= 2, so weight 1 is also empty.
  for_each_stratum_tuple(3, 1, {true}, 1,
                         [&](const std::vector<Label>&) { FAIL(); });
}

}  // namespace
