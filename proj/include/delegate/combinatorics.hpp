#pragma once

#include <algorithm>
#include <cstddef>

namespace delegate {

/// C(n, k) as a double; exact for the small arguments used here.
inline double binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace delegate
