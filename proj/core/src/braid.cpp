#include "fk/braid/braid.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "fk/errors.hpp"

namespace fk::braid {

void validate(const BraidWord& w) {
  if (w.strands < 2)
    raise(ErrorCode::Validation, "braid needs at least 2 strands");
  for (int letter : w.letters) {
    if (letter == 0)
      raise(ErrorCode::Validation, "braid letters must be nonzero");
    if (std::abs(letter) >= w.strands)
      raise(ErrorCode::Validation,
            "braid letter " + std::to_string(letter) +
                " out of range for strands=" + std::to_string(w.strands));
  }
}

BraidWord parse_braid(const std::string& text) {
  // Expected form: "strands=<s>; l1 l2 ..." with ',' or whitespace between
  // letters.
  auto semi = text.find(';');
  if (semi == std::string::npos)
    raise(ErrorCode::Validation,
          "braid text must look like \"strands=3; 1 -2 1 -2\"");
  std::string head = text.substr(0, semi);
  head.erase(std::remove_if(head.begin(), head.end(),
                            [](unsigned char c) { return std::isspace(c); }),
             head.end());
  const std::string prefix = "strands=";
  if (head.rfind(prefix, 0) != 0)
    raise(ErrorCode::Validation, "braid text must start with strands=<count>");
  BraidWord w;
  try {
    w.strands = std::stoi(head.substr(prefix.size()));
  } catch (const std::exception&) {
    raise(ErrorCode::Validation, "invalid strand count in braid text");
  }
  std::string tail = text.substr(semi + 1);
  std::replace(tail.begin(), tail.end(), ',', ' ');
  std::istringstream is(tail);
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      w.letters.push_back(v);
    } catch (const std::exception&) {
      raise(ErrorCode::Validation, "invalid braid letter \"" + tok + "\"");
    }
  }
  if (w.letters.empty())
    raise(ErrorCode::Validation, "braid word must contain at least one letter");
  validate(w);
  return w;
}

std::string to_string(const BraidWord& w) {
  std::ostringstream os;
  os << "strands=" << w.strands << ";";
  for (int letter : w.letters) os << " " << letter;
  return os.str();
}

int writhe(const BraidWord& w) {
  int s = 0;
  for (int letter : w.letters) s += (letter > 0) ? 1 : -1;
  return s;
}

std::vector<int> permutation(const BraidWord& w) {
  std::vector<int> perm(static_cast<std::size_t>(w.strands));
  std::iota(perm.begin(), perm.end(), 1);
  // perm[p-1] = current exit position of the strand entering at p.
  for (int letter : w.letters) {
    int i = std::abs(letter);
    for (auto& target : perm) {
      if (target == i)
        target = i + 1;
      else if (target == i + 1)
        target = i;
    }
  }
  return perm;
}

int closure_components(const BraidWord& w) {
  std::vector<int> perm = permutation(w);
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t start = 0; start < perm.size(); ++start) {
    if (seen[start]) continue;
    ++cycles;
    std::size_t p = start;
    while (!seen[p]) {
      seen[p] = true;
      p = static_cast<std::size_t>(perm[p] - 1);
    }
  }
  return cycles;
}

BraidClass classify(const BraidWord& w) {
  bool any_pos = false, any_neg = false, mixed_index = false;
  std::vector<int> sign_of_index(static_cast<std::size_t>(w.strands), 0);
  for (int letter : w.letters) {
    int idx = std::abs(letter);
    int sign = letter > 0 ? 1 : -1;
    (sign > 0 ? any_pos : any_neg) = true;
    int& seen = sign_of_index[static_cast<std::size_t>(idx)];
    if (seen == 0)
      seen = sign;
    else if (seen != sign)
      mixed_index = true;
  }
  if (!any_neg) return BraidClass::Positive;
  if (!any_pos) return BraidClass::Negative;
  return mixed_index ? BraidClass::General : BraidClass::Homogeneous;
}

const char* to_string(BraidClass c) {
  switch (c) {
    case BraidClass::Positive: return "positive";
    case BraidClass::Negative: return "negative";
    case BraidClass::Homogeneous: return "homogeneous";
    case BraidClass::General: return "general";
  }
  return "unknown";
}

BraidWord mirror(const BraidWord& w) {
  BraidWord m = w;
  for (int& letter : m.letters) letter = -letter;
  return m;
}

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> table = {
      {"3_1r", {2, {1, 1, 1}}},
      {"3_1l", {2, {-1, -1, -1}}},
      {"5_1r", {2, {1, 1, 1, 1, 1}}},
      {"8_19", {3, {1, 2, 1, 1, 2, 1, 2, 1}}},
      {"10_139", {3, {1, 2, 2, 1, 1, 1, 2, 1, 2, 1}}},
      {"10_152", {3, {1, 2, 2, 2, 1, 1, 1, 2, 2, 1}}},
      {"4_1", {3, {1, -2, 1, -2}}},
      {"6_2", {3, {1, 1, 1, -2, 1, -2}}},
      {"6_3", {3, {1, 1, -2, 1, -2, -2}}},
      {"m5_2", {3, {1, 1, 2, -1, 2, 1}}},
      {"m7_3", {3, {1, 1, 1, 1, 2, -1, 2, 1}}},
  };
  return table;
}

std::optional<BraidWord> find_knot(const std::string& name) {
  for (const auto& entry : registry())
    if (entry.name == name) return entry.word;
  return std::nullopt;
}

}  // namespace fk::braid
