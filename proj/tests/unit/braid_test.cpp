// Braid words: parsing, invariants, classification, and the bundled registry.

#include <gtest/gtest.h>

#include "fk/braid/braid.hpp"
#include "fk/errors.hpp"

namespace {

using fk::braid::BraidClass;
using fk::braid::BraidWord;
using fk::braid::classify;
using fk::braid::closure_components;
using fk::braid::find_knot;
using fk::braid::mirror;
using fk::braid::parse_braid;
using fk::braid::permutation;
using fk::braid::registry;
using fk::braid::writhe;

TEST(BraidParse, RoundTripAndSeparators) {
  const BraidWord w = parse_braid("strands=3; 1 -2 1 -2");
  EXPECT_EQ(w.strands, 3);
  EXPECT_EQ(w.letters, (std::vector<int>{1, -2, 1, -2}));
  EXPECT_EQ(fk::braid::to_string(w), "strands=3; 1 -2 1 -2");

  const BraidWord c = parse_braid("strands=2; 1, 1, 1");
  EXPECT_EQ(c.letters, (std::vector<int>{1, 1, 1}));
}

TEST(BraidParse, RejectsMalformedInput) {
  EXPECT_THROW(parse_braid("1 2 3"), fk::Error);           // missing strand count
  EXPECT_THROW(parse_braid("strands=3; 0"), fk::Error);    // zero letter
  EXPECT_THROW(parse_braid("strands=3; 3"), fk::Error);    // index out of range
  EXPECT_THROW(parse_braid("strands=1; "), fk::Error);     // no letters
  EXPECT_THROW(parse_braid("strands=3; 1 x"), fk::Error);  // junk token
}

TEST(BraidInvariants, WritheAndPermutation) {
  const BraidWord trefoil = parse_braid("strands=2; 1 1 1");
  EXPECT_EQ(writhe(trefoil), 3);
  // Odd power of the transposition swaps the two strands.
  EXPECT_EQ(permutation(trefoil), (std::vector<int>{2, 1}));
  EXPECT_EQ(closure_components(trefoil), 1);

  const BraidWord fig8 = parse_braid("strands=3; 1 -2 1 -2");
  EXPECT_EQ(writhe(fig8), 0);
  // Position 1's strand crosses to 2, up to 3, idles, then back to 2.
  EXPECT_EQ(permutation(fig8), (std::vector<int>{2, 3, 1}));
  EXPECT_EQ(closure_components(fig8), 1);

  const BraidWord id2 = parse_braid("strands=3; 1");
  EXPECT_EQ(closure_components(id2), 2);  // one crossing joins only two strands
}

TEST(BraidClassify, AllFourClasses) {
  EXPECT_EQ(classify(parse_braid("strands=2; 1 1 1")), BraidClass::Positive);
  EXPECT_EQ(classify(parse_braid("strands=2; -1 -1 -1")), BraidClass::Negative);
  EXPECT_EQ(classify(parse_braid("strands=3; 1 -2 1 -2")),
            BraidClass::Homogeneous);
  // Mixed signs on generator 1.
  EXPECT_EQ(classify(parse_braid("strands=3; 1 1 2 -1 2 1")),
            BraidClass::General);
}

TEST(BraidClassify, MirrorFlipsSignStructure) {
  const BraidWord w = parse_braid("strands=3; 1 1 1 -2 1 -2");
  EXPECT_EQ(classify(w), BraidClass::Homogeneous);
  const BraidWord m = mirror(w);
  EXPECT_EQ(m.letters, (std::vector<int>{-1, -1, -1, 2, -1, 2}));
  EXPECT_EQ(classify(m), BraidClass::Homogeneous);
  EXPECT_EQ(writhe(m), -writhe(w));
}

TEST(BraidRegistry, EveryEntryIsAKnot) {
  ASSERT_FALSE(registry().empty());
  for (const auto& entry : registry()) {
    SCOPED_TRACE(entry.name);
    EXPECT_NO_THROW(fk::braid::validate(entry.word));
    // All bundled closures are knots, not links.
    EXPECT_EQ(closure_components(entry.word), 1);
  }
}

TEST(BraidRegistry, ExpectedClassesAndWrithes) {
  const struct {
    const char* name;
    BraidClass cls;
    int writhe;
  } expected[] = {
      {"3_1r", BraidClass::Positive, 3},
      {"3_1l", BraidClass::Negative, -3},
      {"5_1r", BraidClass::Positive, 5},
      {"8_19", BraidClass::Positive, 8},
      {"10_139", BraidClass::Positive, 10},
      {"10_152", BraidClass::Positive, 10},
      {"4_1", BraidClass::Homogeneous, 0},
      {"6_2", BraidClass::Homogeneous, 2},
      {"6_3", BraidClass::Homogeneous, 0},
      {"m5_2", BraidClass::General, 4},
      {"m7_3", BraidClass::General, 6},
  };
  for (const auto& row : expected) {
    SCOPED_TRACE(row.name);
    auto w = find_knot(row.name);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(classify(*w), row.cls);
    EXPECT_EQ(writhe(*w), row.writhe);
  }
  EXPECT_FALSE(find_knot("no_such_knot").has_value());
}

}  // namespace
