/**
 * @file braid.hpp
 * @brief Braid words, their invariants, classification, and the bundled
 *        knot registry.
 *
 * A braid word on s strands is a sequence of nonzero letters; letter +i
 * (1 <= i < s) is the positive crossing of positions i, i+1, letter -i its
 * inverse. Words are read left to right. The engine computes series for the
 * closure of the braid, which must be a knot (single closure component).
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fk::braid {

struct BraidWord {
  int strands = 0;
  std::vector<int> letters;
};

/// Parse "strands=3; 1 -2 1 -2" (commas or spaces between letters).
/// Throws Error(Validation) on malformed input or out-of-range letters.
BraidWord parse_braid(const std::string& text);

/// Validity check used by parse_braid and the CLI (throws on failure).
void validate(const BraidWord& w);

/// Render in the canonical "strands=s; l1 l2 ..." form.
std::string to_string(const BraidWord& w);

/// Sum of letter signs.
int writhe(const BraidWord& w);

/// Permutation of strand positions induced by the word: position p's strand
/// exits at permutation[p-1] (1-based values).
std::vector<int> permutation(const BraidWord& w);

/// Number of components of the braid closure (cycles of the permutation).
int closure_components(const BraidWord& w);

/// Sign structure of the word, which picks the evaluation strategy.
enum class BraidClass {
  Positive,     ///< all letters positive
  Negative,     ///< all letters negative
  Homogeneous,  ///< every generator index occurs with one sign only
  General,      ///< mixed signs on some generator index
};

BraidClass classify(const BraidWord& w);
const char* to_string(BraidClass c);

/// Mirror image: flip the sign of every letter.
BraidWord mirror(const BraidWord& w);

/// Bundled braid words for the knots used by the verification layer.
struct RegistryEntry {
  std::string name;
  BraidWord word;
};

const std::vector<RegistryEntry>& registry();

/// Lookup by name ("3_1r", "4_1", ...); nullopt when unknown.
std::optional<BraidWord> find_knot(const std::string& name);

}  // namespace fk::braid
