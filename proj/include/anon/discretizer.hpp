#pragma once

// Profile discretization: players are clustered by TDP cell, every leaf of
// every cell is rounded jointly to multiples of 1/z, and the rounded leaves
// are folded back into full distributions. The result has entries that are
// multiples of 1/(2^k z), stays within 1/z of the input per coordinate and
// never puts mass on a strategy outside the original support.

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/rational.hpp"
#include "anon/tdp.hpp"

namespace anon {

struct DiscretizedProfile {
  unsigned long z = 0;
  MixedProfile profile;
};

/// Largest-remainder rounding to multiples of 1/z: floor every scaled value,
/// then hand one extra unit to each of the r = round(sum of fractional
/// parts) items with the largest fractional part, ties to the lower index.
/// Each item moves by at most 1/z and the total by at most 1/(2z).
inline RationalVector largest_remainder_round(const RationalVector& values, unsigned long z) {
  if (z < 1) throw Error("largest_remainder_round: z must be positive");
  const Rational scale{Integer(z)};
  std::vector<Rational> floors, fracs;
  Rational frac_total = 0;
  for (const auto& v : values) {
    if (v < 0 || v > 1) throw Error("largest_remainder_round: value outside [0,1]");
    Rational scaled = v * scale;
    Rational f = floor_of(scaled);
    floors.push_back(f);
    fracs.push_back(scaled - f);
    frac_total += fracs.back();
  }
  // Round half up.
  const Rational bumps_q = floor_of(Rational(frac_total + Rational(1, 2)));
  const std::size_t bumps = bumps_q.get_num().get_ui();

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fracs[a] > fracs[b]; });
  for (std::size_t i = 0; i < bumps && i < order.size(); ++i) floors[order[i]] += 1;

  RationalVector out;
  out.reserve(values.size());
  for (auto& f : floors) {
    Rational q = f / scale;
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

/// Rounds one cell. All trees must share a cell signature under (z, alpha).
/// Returns the trees with every leaf replaced by its rounded distribution:
/// the first strategy of a leaf gets the jointly rounded value, the second
/// the complement.
inline std::vector<TdpTree> round_cell(const std::vector<TdpTree>& members, unsigned long z, const Rational& alpha) {
  if (members.empty()) return {};
  const CellSignature sig = cell_signature(members.front(), z, alpha);
  for (const auto& t : members)
    if (cell_signature(t, z, alpha) != sig) throw Error("round_cell: signature mismatch among cell members");

  std::vector<TdpTree> out = members;
  for (int leaf : members.front().leaves()) {
    if (members.front().nodes[leaf].strategies.size() != 2) continue;
    RationalVector firsts;
    for (const auto& t : members) firsts.push_back(t.nodes[leaf].probs[0]);
    RationalVector rounded = largest_remainder_round(firsts, z);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].nodes[leaf].probs[0] = rounded[i];
      out[i].nodes[leaf].probs[1] = 1 - rounded[i];
    }
  }
  return out;
}

/// Discretizes every player. Players with a single-strategy support pass
/// through untouched; everyone else is grouped by cell signature and
/// rounded per cell.
inline DiscretizedProfile discretize_profile(const MixedProfile& profile, unsigned long z,
                                             const Rational& alpha = Rational(3, 5)) {
  validate_profile(profile);
  if (z < 2) throw Error("discretize_profile: z must be at least 2");

  DiscretizedProfile result{z, profile};
  std::map<CellSignature, std::vector<int>> cells;
  std::vector<TdpTree> trees(profile.probs.size());
  for (int i = 0; i < profile.players(); ++i) {
    const auto& p = profile.probs[i];
    if (std::count_if(p.begin(), p.end(), [](const Rational& x) { return x > 0; }) <= 1) continue;
    trees[i] = tdp_tree_of(p);
    cells[cell_signature(trees[i], z, alpha)].push_back(i);
  }

  for (const auto& [sig, players] : cells) {
    std::vector<TdpTree> members;
    for (int i : players) members.push_back(trees[i]);
    auto rounded = round_cell(members, z, alpha);
    for (std::size_t j = 0; j < players.size(); ++j)
      result.profile.probs[players[j]] = reconstruct_distribution(rounded[j]);
  }
  return result;
}

}  // namespace anon
