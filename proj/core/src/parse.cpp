#include "fk/algebra/parse.hpp"

#include <cctype>
#include <cstdlib>

namespace fk::algebra {

namespace {

// Recursive-descent parser. Precedence: sum < product < power.
class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  MultiLaurent run() {
    MultiLaurent p = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    raise(ErrorCode::Validation, "polynomial parse error at position " +
                                     std::to_string(pos_) + ": " + why +
                                     " in \"" + s_ + "\"");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool starts_factor(char c) const {
    return c == '(' || c == 'q' || c == 'x' || c == 'a' || c == 't' ||
           std::isdigit(static_cast<unsigned char>(c));
  }

  MultiLaurent parse_sum() {
    bool negate = false;
    char c = peek();
    if (c == '+' || c == '-') {
      negate = (c == '-');
      ++pos_;
    }
    MultiLaurent acc = parse_product();
    if (negate) acc = -acc;
    while (true) {
      c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        MultiLaurent t = parse_product();
        if (c == '-')
          acc -= t;
        else
          acc += t;
      } else {
        return acc;
      }
    }
  }

  MultiLaurent parse_product() {
    MultiLaurent acc = parse_power();
    while (true) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        MultiLaurent f = parse_power();
        if (c == '*')
          acc *= f;
        else
          acc = acc.divide_exact(f);
      } else if (starts_factor(c)) {
        acc *= parse_power();  // implicit multiplication by adjacency
      } else {
        return acc;
      }
    }
  }

  MultiLaurent parse_power() {
    MultiLaurent base = parse_atom();
    if (peek() != '^') return base;
    ++pos_;
    const std::int64_t num4 = parse_exponent();  // four times the exponent
    if (num4 % 4 == 0) {
      std::int64_t e = num4 / 4;
      if (e >= 0) return base.pow(static_cast<std::uint64_t>(e));
      // Negative integer exponent: base must be a monomial (units only).
      if (!base.is_monomial()) fail("negative exponent on a non-monomial");
      const auto& [m, c] = base.terms()[0];
      if (c != 1 && c != -1) fail("negative exponent on non-unit coefficient");
      BigInt coeff = (e % 2 == 0) ? BigInt(1) : c;
      return MultiLaurent::monomial(coeff, Monomial{m.q4 * e, m.x2 * e,
                                                    m.a2 * e});
    }
    // Fractional exponent: only valid on a single-variable monomial base.
    if (!base.is_monomial()) fail("fractional exponent on a non-monomial");
    const auto& [m, c] = base.terms()[0];
    if (c != 1) fail("fractional exponent on a coefficient");
    int nvars = (m.q4 != 0) + (m.x2 != 0) + (m.a2 != 0);
    if (nvars != 1) fail("fractional exponent needs a single-variable base");
    // Each field is an integer multiple of its lattice spacing; scaling by
    // num4/4 must land back on the lattice.
    auto scale = [&](std::int64_t field) {
      std::int64_t prod = field * num4;
      if (prod % 4 != 0) fail("exponent is finer than the variable's lattice");
      return prod / 4;
    };
    return MultiLaurent::monomial(1, Monomial{scale(m.q4), scale(m.x2),
                                              scale(m.a2)});
  }

  // Returns four times the exponent value.
  std::int64_t parse_exponent() {
    skip_ws();
    bool braced = false;
    if (pos_ < s_.size() && s_[pos_] == '{') {
      braced = true;
      ++pos_;
    }
    skip_ws();
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    std::int64_t n = parse_int();
    std::int64_t four = 4 * n;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      skip_ws();
      std::int64_t d = parse_int();
      if (d == 2)
        four = 2 * n;
      else if (d == 4)
        four = n;
      else
        fail("only /2 and /4 denominators are supported in exponents");
    }
    if (neg) four = -four;
    if (braced) {
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '}') fail("expected '}'");
      ++pos_;
    }
    return four;
  }

  std::int64_t parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::strtoll(s_.substr(start, pos_ - start).c_str(), nullptr, 10);
  }

  MultiLaurent parse_atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      MultiLaurent inner = parse_sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      return MultiLaurent::integer(BigInt(s_.substr(start, pos_ - start)));
    }
    if (c == 'q') {
      ++pos_;
      return MultiLaurent::monomial(1, Monomial{4, 0, 0});
    }
    if (c == 'x' || c == 't') {
      ++pos_;
      return MultiLaurent::monomial(1, Monomial{0, 2, 0});
    }
    if (c == 'a') {
      ++pos_;
      return MultiLaurent::monomial(1, Monomial{0, 0, 2});
    }
    fail("expected a factor");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiLaurent parse_poly(const std::string& text) { return Parser(text).run(); }

}  // namespace fk::algebra
