#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

#include "delegate/core.hpp"
#include "delegate/rng.hpp"

namespace test_support {

using XY = std::pair<double, double>;

inline delegate::RealizedInstance make_instance(std::initializer_list<std::initializer_list<XY>> agents) {
  std::vector<std::vector<delegate::Solution>> sols;
  for (const auto& a : agents) {
    std::vector<delegate::Solution> row;
    for (const auto& [x, y] : a) row.emplace_back(x, y);
    sols.push_back(std::move(row));
  }
  return delegate::RealizedInstance(std::move(sols));
}

/// Agents with only x given; y set to 1.
inline delegate::RealizedInstance from_x(std::initializer_list<std::initializer_list<double>> agents) {
  std::vector<std::vector<delegate::Solution>> sols;
  for (const auto& a : agents) {
    std::vector<delegate::Solution> row;
    for (double x : a) row.emplace_back(x, 1.0);
    sols.push_back(std::move(row));
  }
  return delegate::RealizedInstance(std::move(sols));
}

/// Grid instance with values in {0.1, ..., 1.0}; small enough to enumerate.
inline delegate::RealizedInstance grid_instance(delegate::RngStream& rng, std::size_t n, std::size_t k) {
  std::vector<std::vector<delegate::Solution>> sols(n);
  auto draw = [&] { return 0.1 * static_cast<double>(1 + rng() % 10); };
  for (auto& a : sols)
    for (std::size_t j = 0; j < k; ++j) a.emplace_back(draw(), draw());
  return delegate::RealizedInstance(std::move(sols));
}

/// Sorted first-best values, computed without the library.
inline std::vector<double> first_bests_desc(const delegate::RealizedInstance& inst) {
  std::vector<double> v;
  for (std::size_t i = 0; i < inst.n(); ++i) {
    double m = 0.0;
    for (const auto& s : inst.solutions(i)) m = std::max(m, s.x());
    v.push_back(m);
  }
  std::sort(v.rbegin(), v.rend());
  return v;
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace test_support
