#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anon/tv_lab.hpp"
#include "oracles.hpp"

namespace anon {
namespace {

using testing::q;

TEST(PoissonBinomial, Examples) {
  EXPECT_EQ(poisson_binomial_pmf(RationalVector{q(1, 2), q(1, 2)}), (RationalVector{q(1, 4), q(1, 2), q(1, 4)}));
  EXPECT_EQ(poisson_binomial_pmf(RationalVector{}), (RationalVector{q(1)}));
  EXPECT_EQ(poisson_binomial_pmf(RationalVector{q(3, 10), q(7, 10)}),
            (RationalVector{q(21, 100), q(58, 100), q(21, 100)}));
}

TEST(PoissonBinomial, MatchesEnumerationUpToTwelve) {
  std::mt19937_64 rng(4);
  for (int n = 0; n <= 12; ++n) {
    RationalVector p;
    for (int i = 0; i < n; ++i) p.push_back(random_distribution(rng, 2, 40, 0.1)[0]);
    EXPECT_EQ(poisson_binomial_pmf(p), testing::brute_poisson_binomial(p));
  }
}

TEST(PoissonPmf, SumsToOne) {
  for (double lambda : {0.0, 0.3, 4.0, 37.5, 400.0}) {
    const auto pmf = poisson_pmf(lambda);
    double s = 0;
    for (double x : pmf.mass) s += x;
    EXPECT_NEAR(s, 1.0, 1e-11) << lambda;
  }
}

TEST(TranslatedPoisson, ShiftAndRate) {
  // mu - sigma^2 = 2.5: shift 2, rate sigma^2 + 0.5.
  const auto tp = translated_poisson_pmf(7.5, 5.0);
  const auto po = poisson_pmf(5.5);
  EXPECT_EQ(tp.offset, 2);
  EXPECT_NEAR(tp.at(2), po.at(0), 1e-15);
  EXPECT_NEAR(tp.at(9), po.at(7), 1e-15);
}

TEST(PoissonCheck, Examples) {
  const auto r = poisson_tv_check(RationalVector(50, q(1, 100)), 100, q(1, 2));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.tv, 0.1);
  EXPECT_DOUBLE_EQ(r.bound, 0.1);
  EXPECT_GT(r.tv, 0.0);
  const auto e = poisson_tv_check(RationalVector{}, 100, q(1, 2));
  EXPECT_EQ(e.tv, 0.0);
  EXPECT_THROW(poisson_tv_check(RationalVector{q(2, 10)}, 100, q(1, 2)), Error);
}

TEST(PoissonCheck, RandomAdmissible) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const unsigned long z = 20 + uniform_int(rng, 0, 480);
    const Rational alpha = q(static_cast<long>(uniform_int(rng, 3, 8)), 10);
    const Rational cap = leaf_threshold(z, alpha);
    RationalVector p;
    const int n = static_cast<int>(uniform_int(rng, 1, 60));
    for (int i = 0; i < n; ++i) p.push_back(cap * q(static_cast<long>(uniform_int(rng, 0, 100)), 100));
    EXPECT_TRUE(poisson_tv_check(p, z, alpha).pass);
  }
}

TEST(TranslatedPoissonCheck, Examples) {
  EXPECT_EQ(translated_poisson_tv_check(10, 5, 10, 5).tv, 0.0);
  const auto r = translated_poisson_tv_check(10, 5, 10.5, 5);
  EXPECT_NEAR(r.bound, 0.5 / std::sqrt(5.0) + 0.2, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(translated_poisson_tv_check(1, 0, 1, 1), Error);
}

TEST(TranslatedPoissonCheck, RandomPairs) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const double s1 = 1 + 60 * uniform01(rng), s2 = s1 * (0.7 + 0.6 * uniform01(rng));
    const double m1 = s1 + 30 * uniform01(rng), m2 = m1 + 4 * (uniform01(rng) - 0.5);
    EXPECT_TRUE(translated_poisson_tv_check(m1, s1, m2, s2).pass) << m1 << " " << s1 << " " << m2 << " " << s2;
  }
}

TEST(PoissonPoissonCheck, Examples) {
  EXPECT_LT(poisson_poisson_tv_check(4, 1e-9).tv, 1e-6);
  const auto r = poisson_poisson_tv_check(4, 1);
  EXPECT_NEAR(r.bound, std::sqrt(2.0) / 2, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(poisson_poisson_tv_check(0, 1), Error);
}

TEST(PoissonPoissonCheck, RandomPairs) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const double l0 = 0.1 + 100 * uniform01(rng), d = 5 * uniform01(rng) + 1e-6;
    EXPECT_TRUE(poisson_poisson_tv_check(l0, d).pass) << l0 << " " << d;
  }
}

TEST(DiscretizationTv, ZeroAtFixedPoints) {
  MixedProfile p{2, {{q(3, 10), q(7, 10)}, {q(1, 2), q(1, 2)}, {q(0), q(1)}}};
  const auto r = discretization_tv(p, 10, q(3, 5));
  EXPECT_EQ(r.tv, 0.0);
  EXPECT_EQ(r.tv_loo_max, 0.0);
}

TEST(DiscretizationTv, SinglePlayerBound) {
  for (int seed = 0; seed < 20; ++seed) {
    const int k = 2 + seed % 4;
    const unsigned long z = 5 + seed;
    const auto r = discretization_tv(random_profile(1, k, seed), z, q(3, 5));
    EXPECT_LE(r.tv, k / (2.0 * z) + 1e-15);
  }
}

TEST(DiscretizationTv, MatchesBruteForce) {
  const auto p = random_profile(8, 3, 7);
  const auto d = discretize_profile(p, 20, q(3, 5)).profile;
  const Rational brute = testing::brute_tv(testing::brute_sum_law(p.probs, 3), testing::brute_sum_law(d.probs, 3));
  const auto r = discretization_tv(p, 20, q(3, 5));
  EXPECT_EQ(r.tv, brute.get_d());

  double loo = 0;
  for (int j = 0; j < 8; ++j) {
    auto a = p.probs, b = d.probs;
    a.erase(a.begin() + j);
    b.erase(b.begin() + j);
    loo = std::max(loo, testing::brute_tv(testing::brute_sum_law(a, 3), testing::brute_sum_law(b, 3)).get_d());
  }
  EXPECT_EQ(r.tv_loo_max, loo);
}

TEST(Experiment, DeterministicCsv) {
  ExperimentConfig cfg;
  cfg.k = 3;
  cfg.z_list = {10, 20};
  cfg.n_list = {2, 3};
  cfg.trials = 2;
  cfg.base_seed = 5;
  const auto a = to_csv(n_independence_experiment(cfg));
  cfg.jobs = 4;
  EXPECT_EQ(to_csv(n_independence_experiment(cfg)), a);
  EXPECT_EQ(a.substr(0, a.find('\n')), "k,z,alpha,n,trial,seed,tv,tv_loo_max");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 9);
}

TEST(Experiment, ZSweepReusesProfiles) {
  ExperimentConfig cfg;
  cfg.z_list = {10, 40};
  cfg.n_list = {3};
  cfg.trials = 3;
  const auto rows = n_independence_experiment(cfg);
  for (int t = 0; t < 3; ++t) EXPECT_EQ(rows[t].seed, rows[3 + t].seed);
}

TEST(Experiment, LargeZIsNearlyExact) {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.z_list = {10000};
  cfg.n_list = {4};
  cfg.trials = 5;
  for (const auto& r : n_independence_experiment(cfg)) {
    // per-coordinate error 1/z per vector, four vectors
    EXPECT_LE(r.tv, 4.0 * 2 / 10000);
    EXPECT_GE(r.tv_loo_max, 0.0);
  }
}

TEST(Experiment, GuardsLattice) {
  ExperimentConfig cfg;
  cfg.k = 6;
  cfg.z_list = {10};
  cfg.n_list = {200};
  EXPECT_THROW(n_independence_experiment(cfg), GuardError);
}

}  // namespace
}  // namespace anon
