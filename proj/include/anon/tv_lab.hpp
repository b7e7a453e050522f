#pragma once

// Numerical checks around the discretization: total variation between the
// original and discretized sums (with and without each player), the
// n-sweep experiment, and the Poisson / translated-Poisson approximation
// bounds used by the coupling argument.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "anon/discretizer.hpp"
#include "anon/error.hpp"
#include "anon/game.hpp"
#include "anon/multinomial.hpp"
#include "anon/parallel.hpp"
#include "anon/rational.hpp"

namespace anon {

// ---------------------------------------------------------------------------
// Integer-supported pmfs

/// pmf over {offset, offset+1, ...}.
struct IntegerPmf {
  long offset = 0;
  std::vector<double> mass;

  double at(long x) const {
    const long i = x - offset;
    return (i < 0 || i >= static_cast<long>(mass.size())) ? 0.0 : mass[static_cast<std::size_t>(i)];
  }
};

inline double tv_distance(const IntegerPmf& a, const IntegerPmf& b) {
  const long lo = std::min(a.offset, b.offset);
  const long hi = std::max(a.offset + static_cast<long>(a.mass.size()), b.offset + static_cast<long>(b.mass.size()));
  double acc = 0;
  for (long x = lo; x < hi; ++x) acc += std::fabs(a.at(x) - b.at(x));
  return acc / 2;
}

/// Poisson(lambda) truncated once the remaining upper tail is below tail
/// and the mode has been passed.
inline IntegerPmf poisson_pmf(double lambda, double tail = 1e-12) {
  if (lambda < 0 || !std::isfinite(lambda)) throw Error("poisson_pmf: rate must be finite and non-negative");
  IntegerPmf out;
  if (lambda == 0) {
    out.mass = {1.0};
    return out;
  }
  double cumulative = 0;
  for (long j = 0;; ++j) {
    const double p = std::exp(static_cast<double>(j) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(j) + 1));
    out.mass.push_back(p);
    cumulative += p;
    if (static_cast<double>(j) > lambda && (1.0 - cumulative < tail || p < tail * 1e-6)) break;
    if (j > 100000) throw Error("poisson_pmf: rate too large");
  }
  return out;
}

/// Exact law of a sum of independent Bernoulli(probs[i]).
template <typename T>
std::vector<T> poisson_binomial_pmf(const std::vector<T>& probs) {
  std::vector<T> pmf{T(1)};
  for (const auto& p : probs) {
    if (p < 0 || p > 1) throw Error("poisson_binomial_pmf: probability outside [0,1]");
    std::vector<T> next(pmf.size() + 1, T(0));
    const T q = 1 - p;
    for (std::size_t j = 0; j < pmf.size(); ++j) {
      next[j] += pmf[j] * q;
      next[j + 1] += pmf[j] * p;
    }
    pmf = std::move(next);
  }
  return pmf;
}

/// TP(mu, sigma2): Poisson(sigma2 + frac(mu - sigma2)) shifted by
/// floor(mu - sigma2).
inline IntegerPmf translated_poisson_pmf(double mu, double sigma2) {
  if (!(sigma2 > 0)) throw Error("translated_poisson_pmf: variance must be positive");
  const double base = mu - sigma2;
  const double shift = std::floor(base);
  IntegerPmf out = poisson_pmf(sigma2 + (base - shift));
  out.offset = static_cast<long>(shift);
  return out;
}

struct BoundCheck {
  double tv = 0;
  double bound = 0;
  bool pass = false;
};

/// Bernoulli sum against the Poisson law with the same mean, valid when
/// every expectation is at most floor(z^alpha)/z; bound z^(alpha-1).
inline BoundCheck poisson_tv_check(const RationalVector& probs, unsigned long z, const Rational& alpha) {
  const Rational cap = leaf_threshold(z, alpha);
  double lambda = 0;
  std::vector<double> p;
  for (const auto& q : probs) {
    if (q < 0 || q > cap) throw Error("poisson_tv_check: probability exceeds floor(z^alpha)/z");
    p.push_back(q.get_d());
    lambda += p.back();
  }
  IntegerPmf pb{0, poisson_binomial_pmf(p)};
  BoundCheck out;
  out.tv = tv_distance(pb, poisson_pmf(lambda));
  out.bound = std::pow(static_cast<double>(z), alpha.get_d() - 1.0);
  out.pass = out.tv <= out.bound;
  return out;
}

/// TV between two translated Poisson laws against
/// |mu1-mu2|/sigma1 + (|sigma1^2-sigma2^2| + 1)/sigma1^2, after ordering the
/// pair so that floor(mu1 - sigma1^2) <= floor(mu2 - sigma2^2).
inline BoundCheck translated_poisson_tv_check(double mu1, double sigma1_sq, double mu2, double sigma2_sq) {
  if (!(sigma1_sq > 0) || !(sigma2_sq > 0)) throw Error("translated_poisson_tv_check: variance must be positive");
  if (std::floor(mu1 - sigma1_sq) > std::floor(mu2 - sigma2_sq)) {
    std::swap(mu1, mu2);
    std::swap(sigma1_sq, sigma2_sq);
  }
  BoundCheck out;
  out.tv = tv_distance(translated_poisson_pmf(mu1, sigma1_sq), translated_poisson_pmf(mu2, sigma2_sq));
  out.bound = std::fabs(mu1 - mu2) / std::sqrt(sigma1_sq) + (std::fabs(sigma1_sq - sigma2_sq) + 1.0) / sigma1_sq;
  out.pass = out.tv <= out.bound;
  return out;
}

/// TV(Poisson(lambda0 + d), Poisson(lambda0)) against d * sqrt(2 / lambda0).
inline BoundCheck poisson_poisson_tv_check(double lambda0, double d) {
  if (!(lambda0 > 0)) throw Error("poisson_poisson_tv_check: lambda0 must be positive");
  if (!(d > 0)) throw Error("poisson_poisson_tv_check: D must be positive");
  BoundCheck out;
  out.tv = tv_distance(poisson_pmf(lambda0 + d), poisson_pmf(lambda0));
  out.bound = d * std::sqrt(2.0 / lambda0);
  out.pass = out.tv <= out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Discretization experiments

struct DiscretizationTv {
  double tv = 0;
  double tv_loo_max = 0;
};

/// TV between the laws of the original and discretized sums, and the
/// maximum of the same quantity over every leave-one-out subset. Sums are
/// convolved exactly; only the final distances are rounded to double.
inline DiscretizationTv discretization_tv(const MixedProfile& profile, unsigned long z, const Rational& alpha) {
  const auto disc = discretize_profile(profile, z, alpha);
  const int k = profile.k;
  auto tv_of = [&](const std::vector<RationalVector>& a, const std::vector<RationalVector>& b) {
    return tv_distance(sum_distribution<Rational, Rational>(a, k), sum_distribution<Rational, Rational>(b, k)).get_d();
  };

  DiscretizationTv out;
  out.tv = tv_of(profile.probs, disc.profile.probs);
  std::vector<RationalVector> a, b;
  for (int j = 0; j < profile.players(); ++j) {
    a.clear();
    b.clear();
    for (int i = 0; i < profile.players(); ++i) {
      if (i == j) continue;
      a.push_back(profile.probs[i]);
      b.push_back(disc.profile.probs[i]);
    }
    out.tv_loo_max = std::max(out.tv_loo_max, tv_of(a, b));
  }
  return out;
}

struct TvExperimentRow {
  int k = 0;
  unsigned long z = 0;
  Rational alpha;
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double tv = 0;
  double tv_loo_max = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the random profile for (n, trial). It does not depend on z, so a
/// z sweep discretizes the very same profiles.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int n, int trial) {
  return splitmix64(splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(trial));
}

struct ExperimentConfig {
  int k = 3;
  std::vector<unsigned long> z_list;
  std::vector<int> n_list;
  int trials = 1;
  std::uint64_t base_seed = 0;
  Rational alpha{3, 5};
  int jobs = 1;
};

/// Rows ordered by (z, n, trial) in the order the lists were given.
inline std::vector<TvExperimentRow> n_independence_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw Error("tv experiment needs at least one trial");
  for (int n : cfg.n_list) {
    if (n < 1) throw Error("tv experiment needs n >= 1");
    check_guard("sum lattice", partition_count(n, cfg.k), guard_cap(200'000));
  }
  std::vector<TvExperimentRow> rows;
  for (unsigned long z : cfg.z_list)
    for (int n : cfg.n_list)
      for (int t = 0; t < cfg.trials; ++t)
        rows.push_back({cfg.k, z, cfg.alpha, n, t, trial_seed(cfg.base_seed, n, t), 0, 0});

  auto results = parallel_map(rows.size(), cfg.jobs, [&](std::size_t i) {
    const auto& r = rows[i];
    return discretization_tv(random_profile(r.n, r.k, r.seed), r.z, r.alpha);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].tv = results[i].tv;
    rows[i].tv_loo_max = results[i].tv_loo_max;
  }
  return rows;
}

inline const char* tv_csv_header() { return "k,z,alpha,n,trial,seed,tv,tv_loo_max"; }

inline std::string to_csv(const std::vector<TvExperimentRow>& rows) {
  std::ostringstream out;
  out << tv_csv_header() << "\n";
  for (const auto& r : rows)
    out << r.k << ',' << r.z << ',' << shortest_decimal(r.alpha.get_d()) << ',' << r.n << ',' << r.trial << ','
        << r.seed << ',' << shortest_decimal(r.tv) << ',' << shortest_decimal(r.tv_loo_max) << "\n";
  return out.str();
}

}  // namespace anon
