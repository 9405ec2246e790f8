#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace kex::testing {

/// Exact binomial coefficients up to n = 60 (C(60, 30) < 2^63).
class BinomialTable {
 public:
  explicit BinomialTable(int max_n) : n_(max_n + 1), c_(static_cast<std::size_t>(n_ * n_), 0) {
    for (int n = 0; n < n_; ++n) {
      at(n, 0) = 1;
      for (int k = 1; k <= n; ++k) at(n, k) = at(n - 1, k - 1) + (k < n ? at(n - 1, k) : 0);
    }
  }
  std::uint64_t operator()(int n, int k) const {
    if (k < 0 || k > n) return 0;
    return c_[static_cast<std::size_t>(n * n_ + k)];
  }

 private:
  std::uint64_t& at(int n, int k) { return c_[static_cast<std::size_t>(n * n_ + k)]; }
  int n_;
  std::vector<std::uint64_t> c_;
};

/// -log10 P(X >= f) for X ~ Hypergeometric(M, F, m), from exact integer counts.
inline double exact_specificity(const BinomialTable& C, int M, int m, int F, int f) {
  unsigned __int128 num = 0;
  for (int l = f; l <= F && l <= m; ++l) {
    num += static_cast<unsigned __int128>(C(F, l)) * C(M - F, m - l);
  }
  const auto den = static_cast<unsigned __int128>(C(M, m));
  const long double v = std::log10(static_cast<long double>(den)) -
                        std::log10(static_cast<long double>(num));
  return static_cast<double>(v < 0 ? 0 : v);
}

}  // namespace kex::testing
