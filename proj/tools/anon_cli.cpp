// anon: command-line front end for the anonymous-game toolkit.
//
// Exit codes: 0 success, 1 certified failure (no epsilon-equilibrium found,
// verification failed), 2 usage or validation error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "anon/anon.hpp"

namespace {

using anon::Error;
using anon::Json;
using anon::Rational;

constexpr int kOk = 0;
constexpr int kCertifiedFailure = 1;
constexpr int kUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + out_path + "'");
  out << text;
}

Rational parse_epsilon(const std::string& text) {
  Rational eps = anon::parse_rational(text);
  if (eps <= 0 || eps > 1) throw UsageError("epsilon out of range: " + text + " (need 0 < epsilon <= 1)");
  return eps;
}

Rational parse_alpha(const std::string& text) {
  Rational a = anon::parse_rational(text);
  if (a <= 0 || a >= 1) throw UsageError("alpha out of range: " + text + " (need 0 < alpha < 1)");
  return a;
}

void require_z(unsigned long z, unsigned long min = 1) {
  if (z < min) throw UsageError("z must be at least " + std::to_string(min));
}

Json rational_array(const anon::RationalVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(anon::to_string(x));
  return out;
}

Json regret_report_json(const anon::RegretReport<Rational>& report, const Rational& eps) {
  Json players = Json::array();
  for (const auto& p : report.players)
    players.push_back({{"support_gap", anon::to_string(p.support_gap)}, {"regret", anon::to_string(p.regret)}});
  return Json{{"epsilon", anon::to_string(eps)},
              {"max_support_gap", anon::to_string(report.max_support_gap)},
              {"max_support_gap_float", report.max_support_gap.get_d()},
              {"max_regret", anon::to_string(report.max_regret)},
              {"epsilon_nash", report.is_epsilon_nash(eps)},
              {"players", std::move(players)}};
}

struct Options {
  int jobs = 1;
  std::string out;

  // gen
  int n = 2, k = 2;
  std::uint64_t seed = 0;

  // shared
  std::string game, profile, funcs, epsilon = "0.1", alpha = "3/5";
  unsigned long z = 1;

  // solve
  bool escalate = false;
  double budget = 0;
  unsigned long max_z = 1024;

  // tdp-dump
  std::string dist;
  int player = 0;

  // tv-experiment
  std::vector<unsigned long> z_list;
  std::vector<int> n_list;
  int trials = 1;

  // minimax
  bool maximin = false;
};

int run_gen(const Options& o) {
  if (o.n < 2 || o.k < 2) throw UsageError("gen needs n >= 2 and k >= 2");
  emit(o.out, anon::serialize_game(anon::random_game(o.n, o.k, o.seed)));
  return kOk;
}

int run_solve(const Options& o) {
  const auto game = anon::parse_game(read_file(o.game));
  anon::PtasOptions opt;
  opt.epsilon = parse_epsilon(o.epsilon);
  require_z(o.z);
  opt.z = o.z;
  opt.alpha = parse_alpha(o.alpha);
  opt.escalate = o.escalate;
  opt.budget_seconds = o.budget;
  opt.max_z = o.max_z;
  opt.jobs = o.jobs;
  const auto result = anon::ptas_solve(game, opt);

  Json j = anon::profile_to_json(result.profile);
  j["certificate"] = regret_report_json(result.report, opt.epsilon);
  j["certificate"]["certified"] = result.certified;
  j["certificate"]["z"] = result.z;
  j["certificate"]["thetas_examined"] = result.thetas_examined;
  emit(o.out, j.dump(2) + "\n");
  if (!result.certified)
    std::cerr << "no certified " << anon::to_string(opt.epsilon) << "-Nash equilibrium found; best support gap "
              << result.report.max_support_gap.get_d() << " at z=" << result.z << "\n";
  return result.certified ? kOk : kCertifiedFailure;
}

int run_verify(const Options& o) {
  const auto game = anon::parse_game(read_file(o.game));
  const auto profile = anon::parse_profile(read_file(o.profile));
  const Rational eps = parse_epsilon(o.epsilon);
  const auto report = anon::regret_profile<Rational>(game, profile);
  Json j = regret_report_json(report, eps);
  j["pass"] = report.is_epsilon_nash(eps);
  emit(o.out, j.dump(2) + "\n");
  return report.is_epsilon_nash(eps) ? kOk : kCertifiedFailure;
}

int run_discretize(const Options& o) {
  const auto profile = anon::parse_profile(read_file(o.profile));
  require_z(o.z, 2);
  const auto disc = anon::discretize_profile(profile, o.z, parse_alpha(o.alpha));
  emit(o.out, anon::serialize_profile(disc.profile));
  return kOk;
}

int run_sum_dist(const Options& o) {
  const auto profile = anon::parse_profile(read_file(o.profile));
  const auto dist = anon::sum_distribution<Rational, Rational>(profile.probs, profile.k);
  std::ostringstream out;
  out << "partition_rank,mass\n";
  for (std::size_t r = 0; r < dist.mass.size(); ++r) out << r << ',' << anon::to_string(dist.mass[r]) << "\n";
  emit(o.out, out.str());
  return kOk;
}

int run_tdp_dump(const Options& o) {
  anon::RationalVector p;
  if (!o.dist.empty()) {
    std::stringstream ss(o.dist);
    std::string item;
    while (std::getline(ss, item, ',')) p.push_back(anon::parse_rational(item));
  } else if (!o.profile.empty()) {
    const auto profile = anon::parse_profile(read_file(o.profile));
    if (o.player < 0 || o.player >= profile.players()) throw UsageError("player index out of range");
    p = profile.probs[o.player];
  } else {
    throw UsageError("tdp-dump needs --dist or --profile");
  }
  if (anon::sum(p) != 1) throw UsageError("distribution does not sum to 1");
  const auto tree = anon::tdp_tree_of(p);
  std::optional<unsigned long> z;
  if (o.z >= 2) z = o.z;
  emit(o.out, anon::dump_tree(tree, z, parse_alpha(o.alpha)));
  return kOk;
}

int run_tv_experiment(const Options& o) {
  if (o.z_list.empty() || o.n_list.empty()) throw UsageError("tv-experiment needs --z and --n lists");
  for (auto z : o.z_list) require_z(z, 2);
  if (o.k < 2) throw UsageError("tv-experiment needs k >= 2");
  if (o.trials < 1) throw UsageError("tv-experiment needs trials >= 1");
  anon::ExperimentConfig cfg;
  cfg.k = o.k;
  cfg.z_list = o.z_list;
  cfg.n_list = o.n_list;
  cfg.trials = o.trials;
  cfg.base_seed = o.seed;
  cfg.alpha = parse_alpha(o.alpha);
  cfg.jobs = o.jobs;
  emit(o.out, anon::to_csv(anon::n_independence_experiment(cfg)));
  return kOk;
}

int run_minimax(const Options& o) {
  const auto funcs = anon::parse_functions(read_file(o.funcs));
  const Rational requested = parse_epsilon(o.epsilon);
  const Rational eps = anon::admissible_epsilon(requested);
  const auto result = anon::minimax_ptas(funcs, eps, o.maximin);
  Json j{{"objective", o.maximin ? "maximin" : "minimax"},
         {"epsilon_requested", anon::to_string(requested)},
         {"epsilon", anon::to_string(eps)},
         {"value", result.value},
         {"probs", rational_array(result.probs)},
         {"candidates", result.candidates}};
  emit(o.out, j.dump(2) + "\n");
  return kOk;
}

int run_quasi(const Options& o) {
  const auto game = anon::parse_nf_game(read_file(o.game));
  const Rational eps = parse_epsilon(o.epsilon);
  const auto result = anon::quasi_solve(game, eps);
  Json profile = Json::array();
  for (const auto& x : result.profile) profile.push_back(rational_array(x));
  Json j{{"p", game.players()},
         {"s", game.strategies()},
         {"epsilon", anon::to_string(eps)},
         {"grid_units", result.units},
         {"grid_profiles", result.grid_profiles},
         {"examined", result.examined},
         {"profile", std::move(profile)},
         {"max_regret", anon::to_string(result.regret)},
         {"max_regret_float", result.regret.get_d()}};
  emit(o.out, j.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate equilibria of anonymous games and related discretization tools"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--jobs", o.jobs, "Worker threads for theta sweeps and TV trials")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Generate a random anonymous game");
  gen->add_option("--n", o.n, "Players")->required();
  gen->add_option("--k", o.k, "Strategies")->required();
  gen->add_option("--seed", o.seed, "Generator seed")->required();
  gen->add_option("--out", o.out, "Output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Search for a certified epsilon-Nash equilibrium");
  solve->add_option("--game", o.game, "Game file")->required();
  solve->add_option("--epsilon", o.epsilon, "Target epsilon in (0,1]")->required();
  solve->add_option("--z", o.z, "Quantization parameter")->required();
  solve->add_option("--alpha", o.alpha, "Leaf-type exponent");
  solve->add_flag("--escalate", o.escalate, "Double z until success or budget exhaustion");
  solve->add_option("--budget", o.budget, "Time budget in seconds for --escalate");
  solve->add_option("--max-z", o.max_z, "Largest z tried by --escalate");
  solve->add_option("--out", o.out, "Output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Certify a profile by exact regret");
  verify->add_option("--game", o.game, "Game file")->required();
  verify->add_option("--profile", o.profile, "Profile file")->required();
  verify->add_option("--epsilon", o.epsilon, "Epsilon in (0,1]")->required();
  verify->add_option("--out", o.out, "Output file (default stdout)");

  auto* disc = app.add_subcommand("discretize", "Discretize a mixed profile");
  disc->add_option("--profile", o.profile, "Profile file")->required();
  disc->add_option("--z", o.z, "Quantization parameter (>= 2)")->required();
  disc->add_option("--alpha", o.alpha, "Leaf-type exponent");
  disc->add_option("--out", o.out, "Output file (default stdout)");

  auto* sumd = app.add_subcommand("sum-dist", "Exact law of the sum of a profile as CSV");
  sumd->add_option("--profile", o.profile, "Profile file")->required();
  sumd->add_option("--out", o.out, "Output file (default stdout)");

  auto* tdp = app.add_subcommand("tdp-dump", "Print the trickle-down tree of a distribution");
  tdp->add_option("--dist", o.dist, "Comma-separated probabilities, e.g. 1/3,1/3,1/3");
  tdp->add_option("--profile", o.profile, "Profile file");
  tdp->add_option("--player", o.player, "Player index (0-based) when reading a profile");
  tdp->add_option("--z", o.z, "Classify leaves with this z (>= 2)");
  tdp->add_option("--alpha", o.alpha, "Leaf-type exponent");
  tdp->add_option("--out", o.out, "Output file (default stdout)");

  auto* tv = app.add_subcommand("tv-experiment", "Discretization TV sweep over n and z");
  tv->add_option("--k", o.k, "Strategies")->required();
  tv->add_option("--z", o.z_list, "Comma-separated z values")->required()->delimiter(',');
  tv->add_option("--n", o.n_list, "Comma-separated n values")->required()->delimiter(',');
  tv->add_option("--trials", o.trials, "Trials per (z, n)")->required();
  tv->add_option("--seed", o.seed, "Base seed")->required();
  tv->add_option("--alpha", o.alpha, "Leaf-type exponent");
  tv->add_option("--out", o.out, "Output CSV (default stdout)");

  auto* mm = app.add_subcommand("minimax", "Minimax over Bernoulli-sum expectations");
  mm->add_option("--funcs", o.funcs, "Function file")->required();
  mm->add_option("--epsilon", o.epsilon, "Grid step; rounded down to 1/ceil(1/epsilon)")->required();
  mm->add_flag("--maximin", o.maximin, "Solve max-min instead");
  mm->add_option("--out", o.out, "Output file (default stdout)");

  auto* quasi = app.add_subcommand("quasi", "Grid search on a normal-form game");
  quasi->add_option("--game", o.game, "Normal-form game file")->required();
  quasi->add_option("--epsilon", o.epsilon, "Target epsilon in (0,1]")->required();
  quasi->add_option("--out", o.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return run_gen(o);
    if (*solve) return run_solve(o);
    if (*verify) return run_verify(o);
    if (*disc) return run_discretize(o);
    if (*sumd) return run_sum_dist(o);
    if (*tdp) return run_tdp_dump(o);
    if (*tv) return run_tv_experiment(o);
    if (*mm) return run_minimax(o);
    if (*quasi) return run_quasi(o);
  } catch (const anon::GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
