#pragma once

// The partition lattice: all k-tuples of non-negative integers with a fixed
// sum m. Canonical order is ascending lexicographic with the first coordinate
// most significant; ranks in that order index utility tables and
// distributions.

#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "anon/error.hpp"

namespace anon {

using Counts = std::vector<int>;

/// C(n, r) with saturation at uint64 max.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

/// |Pi^k_m| = C(m + k - 1, k - 1).
inline std::uint64_t partition_count(int m, int k) {
  if (k <= 0) return m == 0 ? 1 : 0;
  return binomial(static_cast<std::uint64_t>(m + k - 1), static_cast<std::uint64_t>(k - 1));
}

/// Advances counts to its lexicographic successor among tuples with the same
/// sum. Returns false (leaving counts untouched) at the last tuple.
inline bool next_composition(std::span<int> counts) {
  const int k = static_cast<int>(counts.size());
  if (k <= 1) return false;
  int tail = counts[k - 1];
  for (int j = k - 2; j >= 0; --j) {
    if (tail > 0) {
      ++counts[j];
      for (int i = j + 1; i < k - 1; ++i) counts[i] = 0;
      counts[k - 1] = tail - 1;
      return true;
    }
    tail += counts[j];
  }
  return false;
}

/// First tuple in lexicographic order: (0, ..., 0, m).
inline Counts first_composition(int m, int k) {
  Counts c(static_cast<std::size_t>(k), 0);
  if (k > 0) c.back() = m;
  return c;
}

/// All C(m+k-1, k-1) partitions of m into k parts, ascending lexicographic.
inline std::vector<Counts> enumerate_partitions(int m, int k) {
  if (k < 1 || m < 0) throw Error("enumerate_partitions requires k >= 1 and m >= 0");
  check_guard("partition lattice", partition_count(m, k), guard_cap());
  std::vector<Counts> out;
  out.reserve(partition_count(m, k));
  Counts c = first_composition(m, k);
  do {
    out.push_back(c);
  } while (next_composition(c));
  return out;
}

/// Index of counts within enumerate_partitions(m, k), where m = sum(counts).
inline std::size_t partition_rank(std::span<const int> counts, int m) {
  const int k = static_cast<int>(counts.size());
  if (k < 1) throw Error("partition must have at least one part");
  long total = 0;
  for (int c : counts) {
    if (c < 0) throw Error("malformed partition: negative entry");
    total += c;
  }
  if (total != m) throw Error("malformed partition: entries sum to " + std::to_string(total) +
                              ", expected " + std::to_string(m));
  // Tuples smaller than counts: those agreeing on a prefix and smaller at the
  // next coordinate, with any composition of the remainder afterwards.
  std::uint64_t rank = 0;
  int remaining = m;
  for (int j = 0; j + 1 < k; ++j) {
    const int parts_after = k - j - 1;
    for (int v = 0; v < counts[j]; ++v) rank += partition_count(remaining - v, parts_after);
    remaining -= counts[j];
  }
  return static_cast<std::size_t>(rank);
}

inline std::size_t partition_rank(std::span<const int> counts) {
  return partition_rank(counts, std::accumulate(counts.begin(), counts.end(), 0));
}

}  // namespace anon
