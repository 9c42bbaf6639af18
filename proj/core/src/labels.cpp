#include "fk/weights/labels.hpp"

#include <sstream>

#include "fk/errors.hpp"

namespace fk::weights {

std::string Label::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) os << ",";
    os << e[i];
  }
  os << ")";
  return os.str();
}

Label zero_label(int N) {
  require(N >= 2, "rank parameter must be at least 2");
  Label l;
  l.e.assign(static_cast<std::size_t>(N - 1), 0);
  return l;
}

Label add(const Label& a, const Label& b) {
  require(a.e.size() == b.e.size(), "label rank mismatch");
  Label out = a;
  for (std::size_t i = 0; i < out.e.size(); ++i) out.e[i] += b.e[i];
  return out;
}

bool is_valid_positive(const Label& l) {
  std::int32_t prev = INT32_MAX;
  for (auto v : l.e) {
    if (v < 0 || v > prev) return false;
    prev = v;
  }
  return true;
}

bool is_valid_inverted(const Label& l) {
  std::int32_t prev = INT32_MIN;
  for (auto v : l.e) {
    if (v >= 0 || v <= prev) return false;
    prev = v;
  }
  return true;
}

bool is_valid(const Label& l) {
  return is_valid_positive(l) || is_valid_inverted(l);
}

namespace {

void extend_positive(int remaining, std::int32_t bound, Label& cur,
                     std::vector<Label>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (std::int32_t v = bound; v >= 0; --v) {
    cur.e.push_back(v);
    extend_positive(remaining - 1, v, cur, out);
    cur.e.pop_back();
  }
}

}  // namespace

std::vector<Label> enumerate_labels(int N, std::int32_t max_first) {
  require(N >= 2, "rank parameter must be at least 2");
  std::vector<Label> out;
  Label cur;
  for (std::int32_t f = 0; f <= max_first; ++f) {
    cur.e.assign(1, f);
    extend_positive(N - 2, f, cur, out);
  }
  return out;
}

std::vector<Label> enumerate_labels_with_first(int N, std::int32_t first) {
  require(N >= 2 && first >= 0, "invalid first entry");
  std::vector<Label> out;
  Label cur;
  cur.e.assign(1, first);
  extend_positive(N - 2, first, cur, out);
  return out;
}

std::vector<Label> enumerate_inverted_with_first(int N, std::int32_t mag) {
  require(N >= 2, "rank parameter must be at least 2");
  std::vector<Label> out;
  if (mag < N - 1) return out;  // strict staircase needs room
  // Entries are -(mag) < e_2 < ... < e_{N-1} < 0; choose magnitudes strictly
  // decreasing: mag > m_2 > ... > m_{N-1} >= 1.
  Label cur;
  cur.e.assign(1, -mag);
  std::function<void(int, std::int32_t)> rec = [&](int remaining,
                                                   std::int32_t below) {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (std::int32_t m = below - 1; m >= remaining; --m) {
      cur.e.push_back(-m);
      rec(remaining - 1, m);
      cur.e.pop_back();
    }
  };
  rec(N - 2, mag);
  return out;
}

void for_each_stratum_tuple(
    int N, int count, const std::vector<bool>& inverted_mask,
    std::int32_t weight,
    const std::function<void(const std::vector<Label>&)>& fn) {
  require(count >= 0 && static_cast<int>(inverted_mask.size()) == count,
          "inverted mask size must match strand count");
  std::vector<Label> tuple(static_cast<std::size_t>(count));
  std::function<void(int, std::int32_t)> rec = [&](int idx,
                                                   std::int32_t left) {
    if (idx == count) {
      if (left == 0) fn(tuple);
      return;
    }
    bool inv = inverted_mask[static_cast<std::size_t>(idx)];
    for (std::int32_t part = 0; part <= left; ++part) {
      std::vector<Label> options =
          inv ? enumerate_inverted_with_first(N, part)
              : enumerate_labels_with_first(N, part);
      for (const auto& l : options) {
        tuple[static_cast<std::size_t>(idx)] = l;
        rec(idx + 1, left - part);
      }
    }
  };
  rec(0, weight);
}

}  // namespace fk::weights
