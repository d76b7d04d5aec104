#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace upblab {

// Calls f on every k-subset of {0..n-1} in lexicographic order. Stops early if f returns false.
inline bool for_each_subset(int n, int k, const std::function<bool(const std::vector<int>&)>& f) {
  if (k < 0 || k > n) return true;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[std::size_t(i)] = i;
  while (true) {
    if (!f(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[std::size_t(i)] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[std::size_t(i)];
    for (int j = i + 1; j < k; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
  }
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * std::uint64_t(n - k + i) / std::uint64_t(i);
  return r;
}

inline std::vector<int> complement_of(int n, const std::vector<int>& s) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int i : s) in[std::size_t(i)] = 1;
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[std::size_t(i)]) out.push_back(i);
  return out;
}

}  // namespace upblab
