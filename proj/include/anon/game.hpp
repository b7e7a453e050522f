#pragma once

// Anonymous games and mixed profiles: storage, validation, JSON file formats
// and seeded random instances.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anon/error.hpp"
#include "anon/partition.hpp"
#include "anon/rational.hpp"

namespace anon {

using Json = nlohmann::json;

/// n players, k strategies; utility of player p playing i depends on the
/// partition of the other n-1 players over the k strategies. The table is
/// dense and indexed by partition rank over Pi^k_{n-1}.
class AnonymousGame {
 public:
  AnonymousGame(int n, int k, std::vector<Rational> table) : n_(n), k_(k), table_(std::move(table)) {
    if (n_ < 2) throw Error("game needs n >= 2 players");
    if (k_ < 2) throw Error("game needs k >= 2 strategies");
    const std::uint64_t cells = partition_count(n_ - 1, k_);
    check_guard("utility table", cells * static_cast<std::uint64_t>(n_ * k_), guard_cap());
    cells_ = static_cast<std::size_t>(cells);
    if (table_.size() != static_cast<std::size_t>(n_) * k_ * cells_) throw Error("table size mismatch");
    for (const auto& u : table_)
      if (u < 0 || u > 1) throw Error("utility out of range");
  }

  int players() const { return n_; }
  int strategies() const { return k_; }
  /// |Pi^k_{n-1}|.
  std::size_t cells() const { return cells_; }

  const Rational& utility(int player, int strategy, std::size_t rank) const {
    return table_[index(player, strategy, rank)];
  }
  const Rational& utility(int player, int strategy, std::span<const int> others) const {
    return utility(player, strategy, partition_rank(others, n_ - 1));
  }

  const std::vector<Rational>& table() const { return table_; }

  /// Smallest non-zero utility, or 0 when every payoff is zero.
  Rational min_nonzero_utility() const {
    Rational best = 0;
    for (const auto& u : table_)
      if (u > 0 && (best == 0 || u < best)) best = u;
    return best;
  }

  friend bool operator==(const AnonymousGame& a, const AnonymousGame& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.table_ == b.table_;
  }

 private:
  std::size_t index(int player, int strategy, std::size_t rank) const {
    return (static_cast<std::size_t>(player) * k_ + strategy) * cells_ + rank;
  }

  int n_;
  int k_;
  std::size_t cells_ = 0;
  std::vector<Rational> table_;
};

/// One probability vector per player, exact.
struct MixedProfile {
  int k = 0;
  std::vector<RationalVector> probs;

  int players() const { return static_cast<int>(probs.size()); }
  friend bool operator==(const MixedProfile&, const MixedProfile&) = default;
};

inline void validate_distribution(const RationalVector& p, std::size_t k) {
  if (p.size() != k) throw Error("distribution has " + std::to_string(p.size()) + " entries, expected " +
                                 std::to_string(k));
  for (const auto& x : p)
    if (x < 0) throw Error("negative probability");
  if (sum(p) != 1) throw Error("probabilities do not sum to 1");
}

inline void validate_profile(const MixedProfile& profile) {
  if (profile.k < 1) throw Error("profile needs k >= 1");
  for (const auto& p : profile.probs) validate_distribution(p, static_cast<std::size_t>(profile.k));
}

inline void validate_profile(const MixedProfile& profile, const AnonymousGame& game) {
  if (profile.players() != game.players() || profile.k != game.strategies())
    throw Error("profile dimension mismatch");
  validate_profile(profile);
}

// ---------------------------------------------------------------------------
// Random instances

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

inline std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

inline AnonymousGame random_game(int n, int k, std::uint64_t seed) {
  if (n < 2 || k < 2) throw Error("random_game requires n >= 2 and k >= 2");
  std::mt19937_64 rng(seed);
  const std::size_t size = static_cast<std::size_t>(n) * k * partition_count(n - 1, k);
  std::vector<Rational> table;
  table.reserve(size);
  for (std::size_t i = 0; i < size; ++i) table.emplace_back(uniform01(rng));
  return AnonymousGame(n, k, std::move(table));
}

/// A random distribution with denominator dividing the sum of integer
/// weights drawn from [1, resolution]; each entry is zeroed with
/// probability zero_chance (at least one entry stays positive).
inline RationalVector random_distribution(std::mt19937_64& rng, int k, std::uint64_t resolution = 1000,
                                          double zero_chance = 0.0) {
  std::vector<std::uint64_t> w(static_cast<std::size_t>(k));
  std::uint64_t total = 0;
  for (auto& x : w) {
    x = uniform_int(rng, 1, resolution);
    if (zero_chance > 0 && uniform01(rng) < zero_chance) x = 0;
    total += x;
  }
  if (total == 0) {
    w[uniform_int(rng, 0, static_cast<std::uint64_t>(k - 1))] = 1;
    total = 1;
  }
  RationalVector p;
  p.reserve(w.size());
  for (auto x : w) {
    Rational q(Integer(std::to_string(x)), Integer(std::to_string(total)));
    q.canonicalize();
    p.push_back(q);
  }
  return p;
}

inline MixedProfile random_profile(int n, int k, std::uint64_t seed, std::uint64_t resolution = 1000,
                                   double zero_chance = 0.0) {
  std::mt19937_64 rng(seed);
  MixedProfile profile{k, {}};
  for (int i = 0; i < n; ++i) profile.probs.push_back(random_distribution(rng, k, resolution, zero_chance));
  return profile;
}

// ---------------------------------------------------------------------------
// JSON

/// Reads a float in [0,1] or a "num/den" string.
inline Rational rational_from_json(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(Integer(v.dump()));
  if (v.is_number_float()) return from_double(v.get<double>());
  throw Error("expected a number or a \"num/den\" string");
}

/// Numbers that are exactly representable as doubles are written as JSON
/// numbers (shortest round-trip form); anything else as "num/den".
inline Json rational_to_json(const Rational& q) {
  if (q.get_den() == 1 && mpz_fits_slong_p(q.get_num_mpz_t())) return q.get_num().get_si();
  if (is_exact_double(q)) return Json::number_float_t(q.get_d());
  return to_string(q);
}

inline AnonymousGame game_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("k") || !j.contains("utilities"))
    throw Error("game file needs fields n, k, utilities");
  const int n = j.at("n").get<int>();
  const int k = j.at("k").get<int>();
  if (n < 2) throw Error("game needs n >= 2 players");
  if (k < 2) throw Error("game needs k >= 2 strategies");
  const auto cells = static_cast<std::size_t>(partition_count(n - 1, k));
  const Json& u = j.at("utilities");
  if (!u.is_array() || u.size() != static_cast<std::size_t>(n)) throw Error("table size mismatch");
  std::vector<Rational> table;
  table.reserve(static_cast<std::size_t>(n) * k * cells);
  for (const auto& player : u) {
    if (!player.is_array() || player.size() != static_cast<std::size_t>(k)) throw Error("table size mismatch");
    for (const auto& row : player) {
      if (!row.is_array() || row.size() != cells) throw Error("table size mismatch");
      for (const auto& v : row) table.push_back(rational_from_json(v));
    }
  }
  return AnonymousGame(n, k, std::move(table));
}

inline Json game_to_json(const AnonymousGame& g) {
  Json utilities = Json::array();
  for (int p = 0; p < g.players(); ++p) {
    Json player = Json::array();
    for (int i = 0; i < g.strategies(); ++i) {
      Json row = Json::array();
      for (std::size_t r = 0; r < g.cells(); ++r) row.push_back(rational_to_json(g.utility(p, i, r)));
      player.push_back(std::move(row));
    }
    utilities.push_back(std::move(player));
  }
  return Json{{"n", g.players()}, {"k", g.strategies()}, {"utilities", std::move(utilities)}};
}

inline AnonymousGame parse_game(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("malformed game file: ") + e.what());
  }
  try {
    return game_from_json(j);
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed game file: ") + e.what());
  }
}

inline std::string serialize_game(const AnonymousGame& g) { return game_to_json(g).dump() + "\n"; }

inline MixedProfile profile_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("k") || !j.contains("probs"))
    throw Error("profile file needs fields n, k, probs");
  MixedProfile profile;
  profile.k = j.at("k").get<int>();
  const int n = j.at("n").get<int>();
  const Json& probs = j.at("probs");
  if (!probs.is_array() || probs.size() != static_cast<std::size_t>(n)) throw Error("profile dimension mismatch");
  for (const auto& row : probs) {
    if (!row.is_array()) throw Error("profile rows must be arrays");
    RationalVector p;
    for (const auto& v : row) p.push_back(rational_from_json(v));
    profile.probs.push_back(std::move(p));
  }
  validate_profile(profile);
  return profile;
}

/// Probabilities are always written as exact "num/den" strings.
inline Json profile_to_json(const MixedProfile& profile) {
  Json probs = Json::array();
  for (const auto& p : profile.probs) {
    Json row = Json::array();
    for (const auto& x : p) row.push_back(to_string(x));
    probs.push_back(std::move(row));
  }
  return Json{{"n", profile.players()}, {"k", profile.k}, {"probs", std::move(probs)}};
}

inline MixedProfile parse_profile(const std::string& text) {
  try {
    return profile_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed profile file: ") + e.what());
  }
}

inline std::string serialize_profile(const MixedProfile& profile) { return profile_to_json(profile).dump() + "\n"; }

}  // namespace anon
