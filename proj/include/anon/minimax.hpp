#pragma once

// min over p in [0,1]^n of max_k E[f_k(X_1 + ... + X_n)], X_i ~ Bernoulli(p_i).
//
// The objective is symmetric in the p_i, so restricting each p_i to the grid
// {0, 1/L, ..., 1} leaves C(n+L, n) candidate multisets instead of (L+1)^n
// vectors. Multisets are visited depth first in lexicographic order, reusing
// the partial Poisson-binomial law along each branch.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/partition.hpp"
#include "anon/rational.hpp"

namespace anon {

struct ObjectiveFunctions {
  int n = 0;
  std::vector<std::vector<double>> f;  // f[k][j], j = 0..n

  void validate() const {
    if (n < 1) throw Error("objective functions need n >= 1");
    if (f.empty()) throw Error("objective functions need at least one function");
    for (const auto& fk : f) {
      if (fk.size() != static_cast<std::size_t>(n) + 1) throw Error("function must have n+1 values");
      for (double v : fk)
        if (!(v >= 0 && v <= 1)) throw Error("function value outside [0,1]");
    }
  }
};

namespace detail {

inline double objective_of_pmf(const ObjectiveFunctions& funcs, const std::vector<double>& pmf) {
  double best = 0;
  for (std::size_t k = 0; k < funcs.f.size(); ++k) {
    double e = 0;
    for (std::size_t j = 0; j < pmf.size(); ++j) e += funcs.f[k][j] * pmf[j];
    if (k == 0 || e > best) best = e;
  }
  return best;
}

inline void convolve_bernoulli(const std::vector<double>& pmf, double p, std::vector<double>& out) {
  out.assign(pmf.size() + 1, 0.0);
  const double q = 1.0 - p;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    out[j] += pmf[j] * q;
    out[j + 1] += pmf[j] * p;
  }
}

}  // namespace detail

/// max over functions of E f(sum of Bernoulli(probs)). The law is built by
/// convolving the probabilities in the order given.
inline double objective_value(const ObjectiveFunctions& funcs, const std::vector<double>& probs) {
  funcs.validate();
  if (probs.size() != static_cast<std::size_t>(funcs.n)) throw Error("objective_value: expected n probabilities");
  std::vector<double> pmf{1.0}, next;
  for (double p : probs) {
    if (!(p >= 0 && p <= 1)) throw Error("objective_value: probability outside [0,1]");
    detail::convolve_bernoulli(pmf, p, next);
    pmf.swap(next);
  }
  return detail::objective_of_pmf(funcs, pmf);
}

struct MinimaxResult {
  double value = 0;
  RationalVector probs;  // non-decreasing, each a multiple of 1/levels
  unsigned long levels = 0;
  std::uint64_t candidates = 0;
};

/// Exhaustive multiset search with p_i in {0, 1/L, ..., 1}. Ties keep the
/// lexicographically first multiset. With maximin set, solves
/// max_p min_k E f_k instead, through min_p max_k E (1 - f_k).
inline MinimaxResult minimax_grid(const ObjectiveFunctions& funcs, unsigned long levels, bool maximin = false) {
  funcs.validate();
  if (levels < 1) throw Error("minimax grid needs at least one step");
  const std::uint64_t count = binomial(static_cast<std::uint64_t>(funcs.n) + levels, levels);
  check_guard("minimax multisets", count, guard_cap(50'000'000));

  ObjectiveFunctions work = funcs;
  if (maximin)
    for (auto& fk : work.f)
      for (double& v : fk) v = 1.0 - v;

  std::vector<double> level_value(levels + 1);
  for (unsigned long j = 0; j <= levels; ++j) level_value[j] = static_cast<double>(j) / static_cast<double>(levels);

  const int n = work.n;
  std::vector<std::vector<double>> pmf(static_cast<std::size_t>(n) + 1);
  pmf[0] = {1.0};
  std::vector<unsigned long> choice(static_cast<std::size_t>(n), 0);

  MinimaxResult out;
  out.levels = levels;
  bool have = false;
  std::vector<unsigned long> best_choice;

  auto visit = [&](auto&& self, int depth, unsigned long min_level) -> void {
    if (depth == n) {
      ++out.candidates;
      const double v = detail::objective_of_pmf(work, pmf[n]);
      if (!have || v < out.value) {
        have = true;
        out.value = v;
        best_choice = choice;
      }
      return;
    }
    for (unsigned long l = min_level; l <= levels; ++l) {
      choice[depth] = l;
      detail::convolve_bernoulli(pmf[depth], level_value[l], pmf[depth + 1]);
      self(self, depth + 1, l);
    }
  };
  visit(visit, 0, 0);

  for (unsigned long l : best_choice) {
    Rational q{Integer(l), Integer(levels)};
    q.canonicalize();
    out.probs.push_back(q);
  }
  if (maximin) out.value = 1.0 - out.value;
  return out;
}

/// Requires 1/epsilon to be a positive integer so that grids nest.
inline unsigned long grid_levels(const Rational& epsilon) {
  if (epsilon <= 0 || epsilon > 1) throw Error("epsilon out of range");
  Rational inv = 1 / epsilon;
  inv.canonicalize();
  if (inv.get_den() != 1) throw Error("minimax epsilon must be the reciprocal of an integer");
  return inv.get_num().get_ui();
}

/// 1/ceil(1/epsilon), the largest admissible step not above epsilon.
inline Rational admissible_epsilon(const Rational& epsilon) {
  if (epsilon <= 0 || epsilon > 1) throw Error("epsilon out of range");
  Rational inv = 1 / epsilon;
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
  Rational q{Integer(1), c};
  q.canonicalize();
  return q;
}

inline MinimaxResult minimax_ptas(const ObjectiveFunctions& funcs, const Rational& epsilon, bool maximin = false) {
  return minimax_grid(funcs, grid_levels(epsilon), maximin);
}

/// Fine-grid reference: the same search at resolution 1/g.
inline MinimaxResult minimax_oracle(const ObjectiveFunctions& funcs, unsigned long g, bool maximin = false) {
  return minimax_grid(funcs, g, maximin);
}

inline ObjectiveFunctions functions_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("functions"))
    throw Error("function file needs fields n, functions");
  ObjectiveFunctions funcs;
  funcs.n = j.at("n").get<int>();
  for (const auto& row : j.at("functions")) {
    std::vector<double> fk;
    for (const auto& v : row) fk.push_back(rational_from_json(v).get_d());
    funcs.f.push_back(std::move(fk));
  }
  funcs.validate();
  return funcs;
}

inline ObjectiveFunctions parse_functions(const std::string& text) {
  try {
    return functions_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed function file: ") + e.what());
  }
}

}  // namespace anon
