#pragma once

// Grid search for epsilon-approximate equilibria of small normal-form games:
// every profile whose entries are multiples of 1/U, U = ceil(2ps/epsilon),
// is tried in order. Rounding an exact equilibrium onto that grid (keeping
// zeros at zero) moves every expected payoff by at most epsilon/2, so the
// scan always succeeds.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anon/discretizer.hpp"
#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/partition.hpp"
#include "anon/rational.hpp"

namespace anon {

/// p players with s strategies each. utilities[player][rank], where rank is
/// the mixed-radix index of a pure profile with player 1 most significant.
class NormalFormGame {
 public:
  NormalFormGame(int players, int strategies, std::vector<std::vector<Rational>> utilities)
      : p_(players), s_(strategies), u_(std::move(utilities)) {
    if (p_ < 1) throw Error("normal-form game needs at least one player");
    if (s_ < 1) throw Error("normal-form game needs at least one strategy");
    double size = std::pow(static_cast<double>(s_), p_);
    check_guard("normal-form profiles", static_cast<std::uint64_t>(std::min(size, 1e18)), guard_cap());
    profiles_ = static_cast<std::size_t>(size);
    if (u_.size() != static_cast<std::size_t>(p_)) throw Error("table size mismatch");
    for (const auto& row : u_) {
      if (row.size() != profiles_) throw Error("table size mismatch");
      for (const auto& v : row)
        if (v < 0 || v > 1) throw Error("utility out of range");
    }
  }

  int players() const { return p_; }
  int strategies() const { return s_; }
  std::size_t profiles() const { return profiles_; }
  const Rational& utility(int player, std::size_t rank) const { return u_[player][rank]; }
  const std::vector<std::vector<Rational>>& table() const { return u_; }

  std::size_t rank(const std::vector<int>& pure) const {
    std::size_t r = 0;
    for (int a : pure) r = r * static_cast<std::size_t>(s_) + static_cast<std::size_t>(a);
    return r;
  }

 private:
  int p_;
  int s_;
  std::size_t profiles_ = 0;
  std::vector<std::vector<Rational>> u_;
};

using NfProfile = std::vector<RationalVector>;

/// Pure payoffs per player: out[i][j] = E[u_i | i plays j, others mix].
template <typename T, typename P>
std::vector<std::vector<T>> nf_pure_payoffs(const NormalFormGame& game, const std::vector<std::vector<P>>& mix) {
  const int p = game.players(), s = game.strategies();
  if (static_cast<int>(mix.size()) != p) throw Error("nf profile dimension mismatch");
  for (const auto& x : mix)
    if (static_cast<int>(x.size()) != s) throw Error("nf profile dimension mismatch");

  std::vector<std::vector<T>> out(static_cast<std::size_t>(p), std::vector<T>(static_cast<std::size_t>(s), T(0)));
  std::vector<int> pure(static_cast<std::size_t>(p), 0);
  for (std::size_t r = 0; r < game.profiles(); ++r) {
    // Digits of r, player 1 most significant.
    std::size_t rest = r;
    for (int i = p - 1; i >= 0; --i) {
      pure[i] = static_cast<int>(rest % static_cast<std::size_t>(s));
      rest /= static_cast<std::size_t>(s);
    }
    for (int i = 0; i < p; ++i) {
      T w = 1;
      for (int q = 0; q < p && w != 0; ++q)
        if (q != i) w *= scalar_cast<T>(mix[q][pure[q]]);
      if (w != 0) out[i][pure[i]] += w * convert<T>(game.utility(i, r));
    }
  }
  return out;
}

/// Best pure payoff minus current expected payoff, per player.
template <typename T, typename P>
std::vector<T> nf_regret(const NormalFormGame& game, const std::vector<std::vector<P>>& mix) {
  const auto payoffs = nf_pure_payoffs<T, P>(game, mix);
  std::vector<T> out;
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    T best = payoffs[i][0], current = 0;
    for (std::size_t j = 0; j < payoffs[i].size(); ++j) {
      if (payoffs[i][j] > best) best = payoffs[i][j];
      current += scalar_cast<T>(mix[i][j]) * payoffs[i][j];
    }
    T r = best - current;
    out.push_back(r < 0 ? T(0) : r);
  }
  return out;
}

template <typename T>
T max_of(const std::vector<T>& v) {
  T m = 0;
  for (const auto& x : v)
    if (x > m) m = x;
  return m;
}

/// Grid units U = ceil(2ps / epsilon); the grid step 1/U is at most
/// epsilon / (2ps).
inline unsigned long quasi_grid_units(int players, int strategies, const Rational& epsilon) {
  if (epsilon <= 0 || epsilon > 1) throw Error("epsilon out of range");
  Rational ratio = Rational(2 * players * strategies) / epsilon;
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  return c.get_ui();
}

/// ((U+s-1) choose (s-1))^p grid profiles.
inline std::uint64_t quasi_grid_count(int players, int strategies, unsigned long units) {
  const std::uint64_t per = partition_count(static_cast<int>(units), strategies);
  unsigned __int128 total = 1;
  for (int i = 0; i < players; ++i) {
    total *= per;
    if (total > (static_cast<unsigned __int128>(1) << 63)) return std::uint64_t{1} << 63;
  }
  return static_cast<std::uint64_t>(total);
}

struct QuasiResult {
  NfProfile profile;
  Rational regret;
  unsigned long units = 0;
  std::uint64_t grid_profiles = 0;
  std::uint64_t examined = 0;
};

/// First grid profile (player 1's grid index most significant) whose exact
/// regret is at most epsilon. Candidates are screened in double precision
/// and confirmed exactly.
inline QuasiResult quasi_solve(const NormalFormGame& game, const Rational& epsilon) {
  const int p = game.players(), s = game.strategies();
  QuasiResult out;
  out.units = quasi_grid_units(p, s, epsilon);
  out.grid_profiles = quasi_grid_count(p, s, out.units);
  check_guard("quasi grid profiles", out.grid_profiles, guard_cap());

  const auto grid = enumerate_partitions(static_cast<int>(out.units), s);
  std::vector<RationalVector> exact;
  std::vector<std::vector<double>> approx;
  const Integer den(out.units);
  for (const auto& c : grid) {
    RationalVector v;
    std::vector<double> d;
    for (int x : c) {
      Rational q(Integer(x), den);
      q.canonicalize();
      d.push_back(q.get_d());
      v.push_back(std::move(q));
    }
    exact.push_back(std::move(v));
    approx.push_back(std::move(d));
  }

  const double screen = epsilon.get_d() + 1e-9;
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  std::vector<std::vector<double>> mix_d(static_cast<std::size_t>(p));
  while (true) {
    ++out.examined;
    for (int i = 0; i < p; ++i) mix_d[i] = approx[idx[i]];
    if (max_of(nf_regret<double>(game, mix_d)) <= screen) {
      NfProfile mix;
      for (int i = 0; i < p; ++i) mix.push_back(exact[idx[i]]);
      Rational r = max_of(nf_regret<Rational>(game, mix));
      if (r <= epsilon) {
        out.profile = std::move(mix);
        out.regret = r;
        return out;
      }
    }
    int j = p - 1;
    while (j >= 0 && ++idx[j] == grid.size()) idx[j--] = 0;
    if (j < 0) break;
  }
  throw Error("internal: no grid profile reached regret epsilon; every game has an equilibrium on this grid");
}

struct PerturbationCheck {
  bool pass = false;
  Rational regret;
  NfProfile rounded;
};

/// Rounds a (near-)exact equilibrium onto the 1/U grid by largest remainder,
/// which keeps zero entries at zero and moves each entry by at most 1/U,
/// then tests the regret against epsilon.
inline PerturbationCheck perturbation_check(const NormalFormGame& game, const NfProfile& exact_ne,
                                            const Rational& epsilon) {
  const double input_regret = max_of(nf_regret<double>(game, exact_ne));
  if (input_regret > 1e-9) throw Error("perturbation_check: input is not an equilibrium (regret " +
                                       std::to_string(input_regret) + ")");
  const unsigned long units = quasi_grid_units(game.players(), game.strategies(), epsilon);
  PerturbationCheck out;
  for (const auto& x : exact_ne) out.rounded.push_back(largest_remainder_round(x, units));
  out.regret = max_of(nf_regret<Rational>(game, out.rounded));
  out.pass = out.regret <= epsilon;
  return out;
}

// ---------------------------------------------------------------------------
// Files and instances

inline NormalFormGame nf_game_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("s") || !j.contains("utilities"))
    throw Error("normal-form game file needs fields p, s, utilities");
  const int p = j.at("p").get<int>();
  const int s = j.at("s").get<int>();
  const Json& u = j.at("utilities");
  if (!u.is_array() || u.size() != static_cast<std::size_t>(std::max(p, 0))) throw Error("table size mismatch");
  std::vector<std::vector<Rational>> table;
  for (const auto& row : u) {
    if (!row.is_array()) throw Error("table size mismatch");
    std::vector<Rational> r;
    for (const auto& v : row) r.push_back(rational_from_json(v));
    table.push_back(std::move(r));
  }
  return NormalFormGame(p, s, std::move(table));
}

inline Json nf_game_to_json(const NormalFormGame& g) {
  Json u = Json::array();
  for (const auto& row : g.table()) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(rational_to_json(v));
    u.push_back(std::move(r));
  }
  return Json{{"p", g.players()}, {"s", g.strategies()}, {"utilities", std::move(u)}};
}

inline NormalFormGame parse_nf_game(const std::string& text) {
  try {
    return nf_game_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed normal-form game file: ") + e.what());
  }
}

/// Matching pennies scaled to [0,1]: player 1 wins (payoff 1) on a match.
inline NormalFormGame matching_pennies() {
  auto r = [](long v) { return Rational(v); };
  return NormalFormGame(2, 2, {{r(1), r(0), r(0), r(1)}, {r(0), r(1), r(1), r(0)}});
}

/// Utilities are multiples of 1/resolution drawn uniformly.
inline NormalFormGame random_nf_game(int players, int strategies, std::uint64_t seed, unsigned long resolution = 100) {
  std::mt19937_64 rng(seed);
  const auto size = static_cast<std::size_t>(std::pow(static_cast<double>(strategies), players));
  std::vector<std::vector<Rational>> table(static_cast<std::size_t>(players));
  for (auto& row : table)
    for (std::size_t r = 0; r < size; ++r) {
      Rational q(Integer(std::to_string(uniform_int(rng, 0, resolution))), Integer(resolution));
      q.canonicalize();
      row.push_back(q);
    }
  return NormalFormGame(players, strategies, std::move(table));
}

}  // namespace anon
