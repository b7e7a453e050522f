#pragma once

// Exact law of a sum of independent categorical unit vectors over the
// partition lattice, total variation distance, expected utilities and
// regret of mixed profiles in anonymous games.
//
// Every routine is templated on the scalar: Rational for exact results,
// double for fast experiments. The mode is always chosen by the caller.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/partition.hpp"
#include "anon/rational.hpp"

namespace anon {

template <typename T>
struct SumDistribution {
  int m = 0;
  int k = 0;
  std::vector<T> mass;  // indexed by partition rank over Pi^k_m

  const T& at(std::span<const int> counts) const { return mass[partition_rank(counts, m)]; }
};

namespace detail {

template <typename T>
void check_input_distribution(std::span<const T> p) {
  T total = 0;
  for (const auto& x : p) {
    if (x < 0) throw Error("negative probability in sum_distribution input");
    total += x;
  }
  if constexpr (std::is_same_v<T, double>) {
    if (std::fabs(total - 1.0) > 1e-9) throw Error("input vector does not sum to 1");
  } else {
    if (total != 1) throw Error("input vector does not sum to 1");
  }
}

}  // namespace detail

/// Folds the vectors left to right; after i vectors the support is Pi^k_i.
/// Input entries are converted to T before use.
template <typename T, typename In>
SumDistribution<T> sum_distribution(std::span<const std::vector<In>> vectors, int k) {
  if (k < 1) throw Error("sum_distribution requires k >= 1");
  const int n = static_cast<int>(vectors.size());
  check_guard("sum lattice", partition_count(n, k), guard_cap());

  SumDistribution<T> dist{0, k, {T(1)}};
  std::vector<int> counts;
  for (const auto& raw : vectors) {
    if (static_cast<int>(raw.size()) != k) throw Error("input vector has wrong dimension");
    detail::check_input_distribution<In>(raw);
    std::vector<T> p;
    p.reserve(raw.size());
    for (const auto& x : raw) {
      if constexpr (std::is_same_v<In, T>)
        p.push_back(x);
      else
        p.push_back(convert<T>(x));
    }

    SumDistribution<T> next{dist.m + 1, k, std::vector<T>(partition_count(dist.m + 1, k), T(0))};
    counts = first_composition(dist.m, k);
    std::size_t rank = 0;
    do {
      const T& w = dist.mass[rank++];
      if (w != 0) {
        for (int l = 0; l < k; ++l) {
          if (p[l] == 0) continue;
          ++counts[l];
          next.mass[partition_rank(counts, next.m)] += w * p[l];
          --counts[l];
        }
      }
    } while (next_composition(counts));
    dist = std::move(next);
  }
  return dist;
}

template <typename T, typename In>
SumDistribution<T> sum_distribution(const std::vector<std::vector<In>>& vectors, int k) {
  return sum_distribution<T, In>(std::span<const std::vector<In>>(vectors), k);
}

/// 1/2 * sum |P - Q| over the shared lattice.
template <typename T>
T tv_distance(const SumDistribution<T>& p, const SumDistribution<T>& q) {
  if (p.m != q.m || p.k != q.k || p.mass.size() != q.mass.size())
    throw Error("tv_distance: mismatched lattice dimensions");
  T acc = 0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) acc += abs_value(T(p.mass[i] - q.mass[i]));
  return acc / 2;
}

/// Expected payoff of every pure strategy for one player, given the law of
/// the other players' partition.
template <typename T>
std::vector<T> pure_payoffs(const AnonymousGame& game, int player, const SumDistribution<T>& others) {
  if (others.m != game.players() - 1 || others.k != game.strategies())
    throw Error("opponent distribution has wrong dimensions");
  std::vector<T> out(static_cast<std::size_t>(game.strategies()), T(0));
  for (int i = 0; i < game.strategies(); ++i) {
    T acc = 0;
    for (std::size_t r = 0; r < others.mass.size(); ++r) {
      if (others.mass[r] == 0) continue;
      acc += convert<T>(game.utility(player, i, r)) * others.mass[r];
    }
    out[i] = acc;
  }
  return out;
}

/// E[u^player_strategy(x)] where x is the partition of the n-1 opponents.
template <typename T>
T expected_utility(const AnonymousGame& game, int player, int strategy, std::span<const RationalVector> others) {
  if (static_cast<int>(others.size()) != game.players() - 1)
    throw Error("expected_utility: wrong number of opponent strategies");
  if (player < 0 || player >= game.players() || strategy < 0 || strategy >= game.strategies())
    throw Error("expected_utility: player or strategy out of range");
  auto dist = sum_distribution<T, Rational>(others, game.strategies());
  T acc = 0;
  for (std::size_t r = 0; r < dist.mass.size(); ++r) acc += convert<T>(game.utility(player, strategy, r)) * dist.mass[r];
  return acc;
}

template <typename T>
struct PlayerRegret {
  /// Best pure payoff minus the payoff of the player's mixture.
  T regret = 0;
  /// Largest shortfall of a pure strategy in the player's support against
  /// the best pure response; the epsilon-Nash quantity.
  T support_gap = 0;
  std::vector<T> payoffs;
};

template <typename T>
struct RegretReport {
  std::vector<PlayerRegret<T>> players;
  T max_regret = 0;
  T max_support_gap = 0;

  /// Accepts gap == epsilon.
  bool is_epsilon_nash(const T& epsilon) const { return max_support_gap <= epsilon; }
};

template <typename T>
PlayerRegret<T> player_regret(const std::vector<T>& payoffs, const RationalVector& mix) {
  PlayerRegret<T> out;
  out.payoffs = payoffs;
  const T best = *std::max_element(payoffs.begin(), payoffs.end());
  T mixed = 0;
  for (std::size_t j = 0; j < payoffs.size(); ++j) {
    if (mix[j] == 0) continue;
    mixed += convert<T>(mix[j]) * payoffs[j];
    T gap = best - payoffs[j];
    if (gap > out.support_gap) out.support_gap = gap;
  }
  out.regret = best - mixed;
  if (out.regret < 0) out.regret = 0;  // only reachable through float rounding
  return out;
}

template <typename T>
RegretReport<T> regret_profile(const AnonymousGame& game, const MixedProfile& profile) {
  validate_profile(profile, game);
  RegretReport<T> report;
  std::vector<RationalVector> others;
  others.reserve(profile.probs.size());
  for (int p = 0; p < game.players(); ++p) {
    others.clear();
    for (int q = 0; q < game.players(); ++q)
      if (q != p) others.push_back(profile.probs[q]);
    auto dist = sum_distribution<T, Rational>(others, game.strategies());
    auto pr = player_regret<T>(pure_payoffs(game, p, dist), profile.probs[p]);
    if (pr.regret > report.max_regret) report.max_regret = pr.regret;
    if (pr.support_gap > report.max_support_gap) report.max_support_gap = pr.support_gap;
    report.players.push_back(std::move(pr));
  }
  return report;
}

}  // namespace anon
