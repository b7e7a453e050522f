#pragma once

// Approximation scheme for mixed equilibria of anonymous games: guess how
// many players use each quantized mixed strategy (a theta partition), link
// every player to the quantized strategies that are epsilon-best responses
// against that partition with one copy of the strategy removed, and look for
// a quota-respecting assignment by max flow. Every returned profile is
// certified by exact regret computation.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/max_flow.hpp"
#include "anon/multinomial.hpp"
#include "anon/parallel.hpp"
#include "anon/partition.hpp"
#include "anon/rational.hpp"

namespace anon {

/// All distributions over [k] whose entries are multiples of 1/(2^k z),
/// in lexicographic order of their numerators.
struct QuantizedStrategySet {
  int k = 0;
  unsigned long z = 0;
  unsigned long units = 0;  // 2^k z
  std::vector<RationalVector> strategies;

  std::size_t size() const { return strategies.size(); }
};

inline QuantizedStrategySet enumerate_quantized_strategies(int k, unsigned long z) {
  if (k < 2) throw Error("quantized strategies need k >= 2");
  if (z < 1) throw Error("quantized strategies need z >= 1");
  QuantizedStrategySet set{k, z, (1UL << k) * z, {}};
  const std::uint64_t count = partition_count(static_cast<int>(set.units), k);
  check_guard("quantized strategy set", count, guard_cap(100'000));
  Counts c = first_composition(static_cast<int>(set.units), k);
  const Integer units(set.units);
  do {
    RationalVector s;
    for (int x : c) {
      Rational q(Integer(x), units);
      q.canonicalize();
      s.push_back(q);
    }
    set.strategies.push_back(std::move(s));
  } while (next_composition(c));
  return set;
}

/// Number of theta partitions, C(n + K - 1, K - 1).
inline std::uint64_t theta_count(int n, std::size_t strategies) {
  return partition_count(n, static_cast<int>(strategies));
}

/// Every way to split n players over K strategies, lexicographic order.
inline std::vector<Counts> enumerate_theta(int n, std::size_t strategies) {
  if (n < 1 || strategies < 1) throw Error("enumerate_theta needs n >= 1 and K >= 1");
  check_guard("theta partitions", theta_count(n, strategies), guard_cap());
  return enumerate_partitions(n, static_cast<int>(strategies));
}

/// Edge (i, s) iff theta[s] > 0 and every pure strategy in the support of
/// quantized strategy s is within delta of player i's best pure payoff when
/// the others follow theta with one unit removed from s.
inline BipartiteEdges best_response_edges(const AnonymousGame& game, const QuantizedStrategySet& set,
                                          const Counts& theta, const Rational& delta) {
  if (theta.size() != set.size()) throw Error("best_response_edges: theta has wrong length");
  long total = 0;
  for (int t : theta) total += t;
  if (total != game.players()) throw Error("best_response_edges: theta does not sum to n");
  if (delta < 0) throw Error("best_response_edges: delta must be non-negative");

  const int n = game.players();
  BipartiteEdges edges(static_cast<std::size_t>(n));
  std::vector<RationalVector> others;
  for (std::size_t s = 0; s < theta.size(); ++s) {
    if (theta[s] == 0) continue;
    others.clear();
    for (std::size_t t = 0; t < theta.size(); ++t) {
      const int copies = theta[t] - (t == s ? 1 : 0);
      for (int c = 0; c < copies; ++c) others.push_back(set.strategies[t]);
    }
    const auto dist = sum_distribution<Rational, Rational>(others, game.strategies());
    const auto& sigma = set.strategies[s];
    for (int i = 0; i < n; ++i) {
      const auto payoffs = pure_payoffs(game, i, dist);
      Rational best = payoffs[0];
      for (const auto& u : payoffs)
        if (u > best) best = u;
      bool ok = true;
      for (int l = 0; l < game.strategies() && ok; ++l)
        if (sigma[l] > 0 && best - payoffs[l] > delta) ok = false;
      if (ok) edges[i].push_back(static_cast<int>(s));
    }
  }
  return edges;
}

/// ceil(1 + n (k + log2 z) + log2(1/u_min)): bits needed for exact expected
/// utilities over quantized profiles. Undefined when every payoff is zero.
inline long utility_bit_bound(int n, unsigned long z, int k, const Rational& u_min) {
  if (u_min <= 0) throw Error("utility_bit_bound: u_min must be positive");
  const double bits = 1.0 + n * (k + std::log2(static_cast<double>(z))) - std::log2(u_min.get_d());
  return static_cast<long>(std::ceil(bits));
}

struct PtasOptions {
  Rational epsilon{1, 10};
  unsigned long z = 1;
  /// Carried for reporting; the quantized search itself does not use it.
  Rational alpha{3, 5};
  bool escalate = false;
  /// Wall-clock budget for escalation, seconds; <= 0 means unlimited.
  double budget_seconds = 0;
  unsigned long max_z = 1024;
  int jobs = 1;
};

struct PtasResult {
  bool certified = false;
  MixedProfile profile;
  RegretReport<Rational> report;
  unsigned long z = 0;
  Counts theta;
  std::uint64_t thetas_examined = 0;
};

namespace detail {

struct ThetaOutcome {
  long flow = 0;
  std::vector<int> strategy_of;
};

inline MixedProfile profile_from_assignment(const QuantizedStrategySet& set, const Counts& theta,
                                            std::vector<int> strategy_of) {
  // Unmatched players fill the remaining quota slots in strategy order.
  Counts left = theta;
  for (int s : strategy_of)
    if (s >= 0) --left[s];
  std::size_t cursor = 0;
  for (auto& s : strategy_of) {
    if (s >= 0) continue;
    while (left[cursor] == 0) ++cursor;
    s = static_cast<int>(cursor);
    --left[cursor];
  }
  MixedProfile profile{set.k, {}};
  for (int s : strategy_of) profile.probs.push_back(set.strategies[s]);
  return profile;
}

struct SearchOutcome {
  std::optional<PtasResult> success;
  std::optional<PtasResult> best_effort;
  bool out_of_time = false;
};

inline SearchOutcome search_at(const AnonymousGame& game, const PtasOptions& opt, unsigned long z,
                               std::chrono::steady_clock::time_point deadline, bool has_deadline) {
  const int n = game.players();
  const auto set = enumerate_quantized_strategies(game.strategies(), z);
  check_guard("theta partitions", theta_count(n, set.size()), guard_cap());

  SearchOutcome out;
  Counts theta = first_composition(n, static_cast<int>(set.size()));
  std::uint64_t examined = 0;
  long best_flow = -1;
  Counts best_theta;
  std::vector<int> best_assignment;

  const std::size_t batch_size = static_cast<std::size_t>(std::max(opt.jobs, 1)) * 16;
  bool more = true;
  while (more) {
    std::vector<Counts> batch;
    while (more && batch.size() < batch_size) {
      batch.push_back(theta);
      more = next_composition(theta);
    }
    auto results = parallel_map(batch.size(), opt.jobs, [&](std::size_t i) {
      auto a = max_flow_assignment(best_response_edges(game, set, batch[i], opt.epsilon), batch[i]);
      return ThetaOutcome{a.flow, std::move(a.strategy_of)};
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++examined;
      if (results[i].flow == n) {
        PtasResult r;
        r.profile = profile_from_assignment(set, batch[i], results[i].strategy_of);
        r.report = regret_profile<Rational>(game, r.profile);
        r.certified = r.report.is_epsilon_nash(opt.epsilon);
        r.z = z;
        r.theta = batch[i];
        r.thetas_examined = examined;
        if (r.certified) {
          out.success = std::move(r);
          return out;
        }
        // A full flow is an epsilon-Nash assignment by construction.
        throw Error("internal: full assignment failed certification");
      }
      if (results[i].flow > best_flow) {
        best_flow = results[i].flow;
        best_theta = batch[i];
        best_assignment = results[i].strategy_of;
      }
    }
    if (has_deadline && std::chrono::steady_clock::now() > deadline) {
      out.out_of_time = more;
      break;
    }
  }

  if (best_flow >= 0) {
    PtasResult r;
    r.profile = profile_from_assignment(set, best_theta, best_assignment);
    r.report = regret_profile<Rational>(game, r.profile);
    r.certified = false;
    r.z = z;
    r.theta = best_theta;
    r.thetas_examined = examined;
    out.best_effort = std::move(r);
  }
  return out;
}

}  // namespace detail

/// Scans theta partitions in lexicographic order and returns the first
/// certified epsilon-Nash profile. With escalate set, z doubles after every
/// unsuccessful pass until max_z or the time budget runs out. When nothing
/// certifies, the uncertified profile with the smallest support gap among
/// the per-z best-effort candidates is returned with certified == false.
inline PtasResult ptas_solve(const AnonymousGame& game, const PtasOptions& opt) {
  if (opt.epsilon <= 0) throw Error("ptas_solve: epsilon must be positive");
  if (opt.z < 1) throw Error("ptas_solve: z must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const bool has_deadline = opt.budget_seconds > 0;
  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(opt.budget_seconds));

  std::optional<PtasResult> best;
  for (unsigned long z = opt.z;; z *= 2) {
    auto outcome = detail::search_at(game, opt, z, deadline, has_deadline);
    if (outcome.success) return std::move(*outcome.success);
    if (outcome.best_effort &&
        (!best || outcome.best_effort->report.max_support_gap < best->report.max_support_gap))
      best = std::move(outcome.best_effort);
    if (!opt.escalate || outcome.out_of_time || z * 2 > opt.max_z) break;
    if (has_deadline && std::chrono::steady_clock::now() > deadline) break;
  }
  if (!best) throw Error("ptas_solve: no candidate examined");
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Exhaustive grid oracle. Shares no search code with ptas_solve: expected
// payoffs come from enumerating the opponents' pure profiles directly.

struct OracleResult {
  MixedProfile profile;
  Rational support_gap;
};

namespace detail {

inline Rational oracle_support_gap(const AnonymousGame& game, const std::vector<RationalVector>& mix) {
  const int n = game.players(), k = game.strategies();
  Rational worst = 0;
  std::vector<int> pure(static_cast<std::size_t>(n - 1), 0);
  Counts counts(static_cast<std::size_t>(k));
  for (int p = 0; p < n; ++p) {
    std::vector<int> opp;
    for (int q = 0; q < n; ++q)
      if (q != p) opp.push_back(q);
    std::vector<Rational> payoff(static_cast<std::size_t>(k), Rational(0));
    std::fill(pure.begin(), pure.end(), 0);
    while (true) {
      Rational w = 1;
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t j = 0; j < opp.size() && w != 0; ++j) {
        w *= mix[opp[j]][pure[j]];
        ++counts[pure[j]];
      }
      if (w != 0) {
        const std::size_t rank = partition_rank(counts, n - 1);
        for (int s = 0; s < k; ++s) payoff[s] += w * game.utility(p, s, rank);
      }
      std::size_t j = 0;
      while (j < pure.size() && ++pure[j] == k) pure[j++] = 0;
      if (j == pure.size()) break;
    }
    Rational best = payoff[0];
    for (const auto& u : payoff)
      if (u > best) best = u;
    for (int s = 0; s < k; ++s)
      if (mix[p][s] > 0 && best - payoff[s] > worst) worst = best - payoff[s];
  }
  return worst;
}

}  // namespace detail

/// Minimum exact support gap over every profile whose entries are
/// multiples of 1/g. First minimum in scan order wins.
inline OracleResult brute_force_oracle(const AnonymousGame& game, unsigned long g) {
  if (g < 1) throw Error("brute_force_oracle: grid resolution must be positive");
  const int n = game.players(), k = game.strategies();
  const auto grid = enumerate_partitions(static_cast<int>(g), k);
  const double profiles = std::pow(static_cast<double>(grid.size()), n);
  const double work = profiles * n * std::pow(static_cast<double>(k), n - 1);
  check_guard("oracle grid profiles", static_cast<std::uint64_t>(std::min(profiles, 1e18)), guard_cap(10'000'000));
  check_guard("oracle work", static_cast<std::uint64_t>(std::min(work, 1e18)), guard_cap(200'000'000));

  std::vector<RationalVector> points;
  const Integer den(g);
  for (const auto& c : grid) {
    RationalVector v;
    for (int x : c) {
      Rational q(Integer(x), den);
      q.canonicalize();
      v.push_back(q);
    }
    points.push_back(std::move(v));
  }

  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<RationalVector> mix(static_cast<std::size_t>(n));
  std::optional<OracleResult> best;
  while (true) {
    for (int p = 0; p < n; ++p) mix[p] = points[idx[p]];
    Rational gap = detail::oracle_support_gap(game, mix);
    if (!best || gap < best->support_gap) {
      best = OracleResult{MixedProfile{k, mix}, gap};
      if (gap == 0) break;
    }
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == points.size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  return std::move(*best);
}

}  // namespace anon
