#pragma once

// Lexicographic k-subset enumeration with saturating counting and unranking,
// used to partition support enumeration across workers deterministically.

#include <cstdint>
#include <vector>

#include "ripcert/errors.hpp"

namespace ripcert {

// C(n, k) saturated at cap (cap itself must be < 2^63).
inline std::uint64_t binom_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (acc > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(acc);
}

// The rank-th k-subset of {0..n-1} in lexicographic order.
inline std::vector<int> unrank_combination(int n, int k, std::uint64_t rank) {
  std::vector<int> comb(static_cast<std::size_t>(k));
  int next = 0;
  for (int i = 0; i < k; ++i) {
    for (int c = next;; ++c) {
      if (c > n - (k - i)) throw input_error("combination rank out of range");
      const std::uint64_t block = binom_capped(n - c - 1, k - i - 1, ~std::uint64_t{0} >> 1);
      if (rank < block) {
        comb[static_cast<std::size_t>(i)] = c;
        next = c + 1;
        break;
      }
      rank -= block;
    }
  }
  return comb;
}

// Advances to the lexicographic successor; false when comb was the last one.
inline bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[static_cast<std::size_t>(i)] < n - (k - i)) {
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace ripcert
