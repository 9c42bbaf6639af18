#include "fk/algebra/qfunc.hpp"

namespace fk::algebra {

MultiLaurent quantum_integer(std::int64_t n) {
  if (n == 0) return MultiLaurent::zero();
  if (n < 0) return -quantum_integer(-n);
  // [n] = q^{(n-1)/2} + q^{(n-3)/2} + ... + q^{-(n-1)/2}
  std::vector<MultiLaurent::Term> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    terms.emplace_back(q_power4(2 * (n - 1 - 2 * i)), BigInt(1));
  return MultiLaurent::from_terms(std::move(terms));
}

MultiLaurent quantum_factorial(std::int64_t n) {
  require(n >= 0, "quantum_factorial needs n >= 0");
  MultiLaurent p = MultiLaurent::one();
  for (std::int64_t i = 2; i <= n; ++i) p *= quantum_integer(i);
  return p;
}

MultiLaurent pochhammer(const MultiLaurent& base, std::int64_t step4,
                        std::int64_t n) {
  require(n >= 0, "pochhammer length must be nonnegative here");
  require(base.is_monomial(), "pochhammer base must be a monomial");
  const auto& [m, c] = base.terms()[0];
  MultiLaurent p = MultiLaurent::one();
  for (std::int64_t i = 0; i < n; ++i) {
    Monomial mi = m;
    mi.q4 += i * step4;
    p *= (MultiLaurent::one() - MultiLaurent::monomial(c, mi));
  }
  return p;
}

MultiLaurent qq_pochhammer(std::int64_t n) {
  return pochhammer(MultiLaurent::monomial(1, q_power4(4)), 4, n);
}

MultiLaurent qinv_pochhammer(std::int64_t n) {
  return pochhammer(MultiLaurent::monomial(1, q_power4(-4)), -4, n);
}

MultiLaurent gauss_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return MultiLaurent::zero();
  return qq_pochhammer(n).divide_exact(qq_pochhammer(k) * qq_pochhammer(n - k));
}

BigInt binomial_int(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n || n < 0) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return out;
}

}  // namespace fk::algebra
