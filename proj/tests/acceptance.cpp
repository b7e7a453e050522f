// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds and tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anon/anon.hpp"
#include "oracles.hpp"
#include "run_cli.hpp"

using namespace anon;
using testing::q;

namespace {

// Time limits per criterion, seconds.
constexpr double kLimitTdp = 5;
constexpr double kLimitDiscretize = 10;
constexpr double kLimitNIndependence = 600;
constexpr double kLimitPoisson = 5;
constexpr double kLimitLemmas = 10;
constexpr double kLimitPtas = 120;
constexpr double kLimitFlow = 10;
constexpr double kLimitQuasi = 30;
constexpr double kLimitMinimax = 60;
constexpr double kLimitDeterminism = 300;

// Flatness in n: median TV at n=16 may be at most this multiple of n=4.
constexpr double kFlatnessFactor = 2.0;
// Largest minimax gap (eps = 1/4 vs g = 32, n = 6) accepted. The pilot over
// the fixture seeds 900..919 peaked at 0.0526; other seed ranges stayed
// below 0.033.
constexpr double kMinimaxGapThreshold = 0.1;
constexpr std::uint64_t kMinimaxSeedBase = 900;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= limit;
  const bool ok = out.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s  %2d  %-34s %8.2fs (limit %gs)  %s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(), secs, limit,
              out.detail.c_str(), in_time ? "" : " [over time limit]");
  std::fflush(stdout);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

Outcome tdp_exactness() {
  std::mt19937_64 rng(1);
  const std::uint64_t resolutions[] = {3, 10, 97, 1000, 1u << 24};
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const int k = 2 + t % 5;
    const auto p = random_distribution(rng, k, resolutions[(t / 5) % 5], 0.0);
    const auto tree = tdp_tree_of(p);
    const int leaves = static_cast<int>(tree.leaves().size());
    if (reconstruct_distribution(tree) != p || leaves > k - 1 || tree.max_depth() > k) ++bad;
  }
  return {bad == 0, "1000 trees, " + std::to_string(bad) + " violations"};
}

Outcome discretization_properties() {
  int cases = 0, bad = 0;
  for (int seed = 0; seed < 120; ++seed) {
    const int n = 1 + seed % 20;
    const int k = 2 + seed % 3;
    const auto p = random_profile(n, k, 7000 + seed, seed % 3 ? 1000 : 9, 0.25);
    for (unsigned long z : {5ul, 10ul, 50ul}) {
      ++cases;
      const auto d = discretize_profile(p, z).profile;
      const Integer grid = (Integer(1) << k) * Integer(z);
      const Rational step(1, static_cast<long>(z));
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < k; ++l) {
          const auto& x = d.probs[i][l];
          if (abs(x - p.probs[i][l]) > step || !is_multiple_of_inverse(x, grid) || (p.probs[i][l] == 0 && x != 0))
            ++bad;
        }
    }
  }
  return {bad == 0, std::to_string(cases) + " profiles, " + std::to_string(bad) + " violating entries"};
}

Outcome n_independence() {
  ExperimentConfig cfg;
  cfg.k = 3;
  cfg.alpha = q(3, 5);
  cfg.z_list = {10, 20, 40};
  cfg.n_list = {2, 4, 8, 16};
  cfg.trials = 30;
  cfg.base_seed = 2024;
  const auto rows = n_independence_experiment(cfg);
  auto med = [&](unsigned long z, int n) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.z == z && r.n == n) v.push_back(r.tv);
    return median(v);
  };
  const double m4 = med(20, 4), m16 = med(20, 16);
  bool flat = m16 <= kFlatnessFactor * m4;
  bool monotone = true;
  for (int n : cfg.n_list) monotone = monotone && med(20, n) <= med(10, n) && med(40, n) <= med(20, n);
  std::string detail = "z=20 median n=4 " + fmt(m4) + ", n=16 " + fmt(m16) + "; z-monotone " + (monotone ? "yes" : "no");
  return {flat && monotone, detail};
}

Outcome poisson_bound() {
  const auto fixed = poisson_tv_check(RationalVector(50, q(1, 100)), 100, q(1, 2));
  bool ok = fixed.pass && fixed.tv <= 0.1;
  std::mt19937_64 rng(4);
  int passed = 0;
  for (int t = 0; t < 20; ++t) {
    const unsigned long z = 10 + uniform_int(rng, 0, 990);
    const Rational alpha = q(static_cast<long>(uniform_int(rng, 1, 9)), 10);
    const Rational cap = leaf_threshold(z, alpha);
    RationalVector p;
    const auto n = uniform_int(rng, 1, 80);
    for (std::uint64_t i = 0; i < n; ++i) p.push_back(cap * q(static_cast<long>(uniform_int(rng, 0, 1000)), 1000));
    passed += poisson_tv_check(p, z, alpha).pass;
  }
  return {ok && passed == 20, "50x0.01 tv " + fmt(fixed.tv) + " <= 0.1; random " + std::to_string(passed) + "/20"};
}

Outcome approximation_lemmas() {
  std::mt19937_64 rng(5);
  int tp = 0, pp = 0;
  double worst_ratio = 0;
  for (int t = 0; t < 20; ++t) {
    const double s1 = 0.5 + 80 * uniform01(rng), s2 = 0.5 + 80 * uniform01(rng);
    const double m1 = s1 + 50 * uniform01(rng), m2 = s2 + 50 * uniform01(rng);
    const auto r = translated_poisson_tv_check(m1, s1, m2, s2);
    tp += r.pass;
    worst_ratio = std::max(worst_ratio, r.tv / r.bound);
  }
  for (int t = 0; t < 20; ++t) {
    const double l0 = 0.05 + 200 * uniform01(rng), d = 1e-4 + 10 * uniform01(rng);
    const auto r = poisson_poisson_tv_check(l0, d);
    pp += r.pass;
    worst_ratio = std::max(worst_ratio, r.tv / r.bound);
  }
  return {tp == 20 && pp == 20, "translated " + std::to_string(tp) + "/20, Poisson-Poisson " + std::to_string(pp) +
                                    "/20, max tv/bound " + fmt(worst_ratio)};
}

Outcome ptas_certification() {
  PtasOptions anti;
  anti.epsilon = q(1, 10);
  anti.z = 1;
  const auto a = ptas_solve(testing::anti_coordination(), anti);
  bool ok = a.certified && a.report.max_support_gap == 0 && a.z == 1 &&
            a.profile.probs == std::vector<RationalVector>{{q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}};
  int good = 0;
  Rational worst = 0;
  for (int s = 0; s < 20; ++s) {
    const auto g = random_game(2 + s % 2, 2, 5000 + s);
    PtasOptions opt;
    opt.epsilon = q(1, 5);
    opt.z = 1;
    opt.escalate = true;
    opt.max_z = 4;
    const auto r = ptas_solve(g, opt);
    const Rational gap = regret_profile<Rational>(g, r.profile).max_support_gap;
    const auto oracle = brute_force_oracle(g, 8);
    if (gap <= opt.epsilon && gap <= oracle.support_gap + opt.epsilon && r.z <= 4) ++good;
    if (gap > worst) worst = gap;
  }
  return {ok && good == 20, std::string("anti-coordination gap 0 ") + (ok ? "yes" : "no") + "; random " +
                                std::to_string(good) + "/20, worst gap " + fmt(worst.get_d())};
}

Outcome max_flow_agreement() {
  std::mt19937_64 rng(7);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(uniform_int(rng, 0, 7));
    const int s = 1 + static_cast<int>(uniform_int(rng, 0, 5));
    Counts theta(static_cast<std::size_t>(s), 0);
    for (int i = 0; i < n; ++i) ++theta[uniform_int(rng, 0, s - 1)];
    const double density = 0.15 + 0.7 * uniform01(rng);
    BipartiteEdges edges(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < s; ++j)
        if (uniform01(rng) < density) edges[i].push_back(j);
    const auto got = max_flow_assign(edges, theta, n);
    bool valid = true;
    if (got) {
      Counts used(static_cast<std::size_t>(s), 0);
      for (int i = 0; i < n; ++i) {
        valid = valid && std::find(edges[i].begin(), edges[i].end(), (*got)[i]) != edges[i].end();
        ++used[(*got)[i]];
      }
      valid = valid && used == theta;
    }
    agree += valid && got.has_value() == testing::exhaustive_assignment_exists(edges, theta);
  }
  return {agree == 200, std::to_string(agree) + "/200 agree with exhaustive matching"};
}

Outcome quasi_ptas() {
  const auto mp = quasi_solve(matching_pennies(), q(3, 10));
  bool ok = mp.regret <= q(3, 10);
  int passed = 0;
  for (int s = 0; s < 10; ++s) {
    const auto g = random_nf_game(2, 2, 8000 + s);
    const auto ne = testing::closed_form_2x2_equilibrium(g);
    passed += perturbation_check(g, ne, q(3, 10)).pass;
  }
  return {ok && passed == 10, "matching pennies regret " + fmt(mp.regret.get_d()) + "; perturbation " +
                                  std::to_string(passed) + "/10"};
}

ObjectiveFunctions random_pair(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ObjectiveFunctions f{n, {}};
  for (int k = 0; k < 2; ++k) {
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (auto& x : v) x = uniform01(rng);
    f.f.push_back(std::move(v));
  }
  return f;
}

Outcome minimax_ptas_check() {
  ObjectiveFunctions lin{1, {{0.0, 1.0}, {1.0, 0.0}}};
  const auto l = minimax_ptas(lin, q(1, 2));
  bool ok = l.value == 0.5 && l.probs == RationalVector{q(1, 2)};
  int nested = 0;
  for (int t = 0; t < 20; ++t) {
    const auto f = random_pair(4, 300 + t);
    const long inv = 2 + t % 3;
    nested += minimax_ptas(f, q(1, inv)).value >= minimax_oracle(f, static_cast<unsigned long>(inv * 4)).value;
  }
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const auto f = random_pair(6, kMinimaxSeedBase + t);
    worst = std::max(worst, minimax_ptas(f, q(1, 4)).value - minimax_oracle(f, 32).value);
  }
  return {ok && nested == 20 && worst <= kMinimaxGapThreshold,
          "n=1 value " + fmt(l.value) + "; nesting " + std::to_string(nested) + "/20; max gap " + fmt(worst) +
              " (threshold " + fmt(kMinimaxGapThreshold) + ")"};
}

Outcome cli_determinism() {
  const auto dir = testing::scratch_dir("acceptance");
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  testing::write_file(p("profile.json"), serialize_profile(random_profile(5, 3, 12)));
  testing::write_file(p("funcs.json"), R"({"n":4,"functions":[[0,0.25,0.5,0.75,1],[1,0.6,0.3,0.1,0]]})");
  testing::write_file(p("nf.json"), nf_game_to_json(random_nf_game(2, 2, 3)).dump());
  if (testing::run_cli("gen --n 3 --k 2 --seed 21 --out " + p("game.json")).code != 0) return {false, "gen failed"};
  if (testing::run_cli("solve --game " + p("game.json") + " --epsilon 0.2 --z 1 --out " + p("sol.json")).code != 0)
    return {false, "solve failed"};

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "gen --n 3 --k 3 --seed 5"},
      {"solve", "solve --game " + p("game.json") + " --epsilon 0.05 --z 1 --escalate --max-z 4"},
      {"verify", "verify --game " + p("game.json") + " --profile " + p("sol.json") + " --epsilon 0.2"},
      {"discretize", "discretize --profile " + p("profile.json") + " --z 10"},
      {"sum-dist", "sum-dist --profile " + p("profile.json")},
      {"tdp-dump", "tdp-dump --profile " + p("profile.json") + " --player 2 --z 20"},
      {"tv-experiment", "tv-experiment --k 3 --z 10,20 --n 2,4 --trials 3 --seed 9"},
      {"minimax", "minimax --funcs " + p("funcs.json") + " --epsilon 0.25"},
      {"quasi", "quasi --game " + p("nf.json") + " --epsilon 0.3"},
  };
  std::string broken;
  for (const auto& [name, args] : commands) {
    const auto a = testing::run_cli(args);
    const auto b = testing::run_cli(args);
    const auto c = testing::run_cli("--jobs 4 " + args);
    if (a.code < 0 || a.code == 2 || a.out.empty() || a.out != b.out || a.out != c.out || a.code != b.code ||
        a.code != c.code)
      broken += " " + name;
  }
  std::filesystem::remove_all(dir);
  if (!broken.empty()) return {false, "differs or failed:" + broken};
  return {true, std::to_string(commands.size()) + " subcommands byte-identical (x2 and --jobs 4)"};
}

}  // namespace

int main() {
  criterion(1, "TDP exactness", kLimitTdp, tdp_exactness);
  criterion(2, "discretization properties", kLimitDiscretize, discretization_properties);
  criterion(3, "n-independence proxy", kLimitNIndependence, n_independence);
  criterion(4, "Poisson bound", kLimitPoisson, poisson_bound);
  criterion(5, "translated/Poisson-Poisson lemmas", kLimitLemmas, approximation_lemmas);
  criterion(6, "PTAS certification", kLimitPtas, ptas_certification);
  criterion(7, "max-flow correctness", kLimitFlow, max_flow_agreement);
  criterion(8, "quasi-PTAS", kLimitQuasi, quasi_ptas);
  criterion(9, "minimax PTAS", kLimitMinimax, minimax_ptas_check);
  criterion(10, "CLI determinism", kLimitDeterminism, cli_determinism);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
