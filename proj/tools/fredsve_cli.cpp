#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fredsve.h"

namespace {

using nlohmann::json;

// Exits the process with the API status when a call fails.
void check(fredsve_status st) {
  if (st == FREDSVE_OK) return;
  std::cerr << "error: " << fredsve_last_error() << "\n";
  std::exit(static_cast<int>(st));
}

std::string take(char* s) {
  std::string out = s ? s : "";
  fredsve_string_free(s);
  return out;
}

struct SessionGuard {
  fredsve_session* s = nullptr;
  ~SessionGuard() { fredsve_session_close(s); }
};

// Shared flags for the grid-running subcommands: an optional JSON config
// file plus single-value overrides that take precedence over it.
struct GridArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> eta;
  std::optional<double> alpha;

  void attach(CLI::App* cmd, bool with_alpha = false) {
    cmd->add_option("--config", config_path, "JSON experiment config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "directory for CSV/JSON artifacts");
    cmd->add_option("--seed", seed, "run a single seed instead of the configured list");
    cmd->add_option("--tol", tol, "kernel factorization tolerance");
    cmd->add_option("--eta", eta, "discrepancy-principle safety factor");
    if (with_alpha)
      cmd->add_option("--alpha", alpha, "run a single noise level");
  }

  std::string merged_config() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read " << config_path << "\n";
        std::exit(1);
      }
      in >> j;
    }
    if (seed) j["seeds"] = {*seed};
    if (tol) j["aca_tol"] = *tol;
    if (eta) j["eta"] = *eta;
    if (alpha) j["alphas"] = {*alpha};
    if (!out_dir.empty()) j["output_dir"] = out_dir;
    return j.dump();
  }
};

int cmd_problems_list() {
  char* out = nullptr;
  check(fredsve_problem_list(&out));
  for (const auto& name : json::parse(take(out)))
    std::cout << name.get<std::string>() << "\n";
  return 0;
}

int cmd_solve(const std::string& problem, const std::string& method, double alpha,
              double eta, std::uint64_t seed, double tol, double cutoff) {
  SessionGuard g;
  check(fredsve_session_open(problem.c_str(), tol, cutoff, &g.s));
  json options{{"method", method}, {"alpha", alpha}, {"eta", eta}, {"seed", seed}};
  char* out = nullptr;
  check(fredsve_solve(g.s, options.dump().c_str(), &out));
  std::cout << json::parse(take(out)).dump(2) << "\n";
  return 0;
}

int cmd_sve(const std::string& problem, double tol, double cutoff) {
  SessionGuard g;
  check(fredsve_session_open(problem.c_str(), tol, cutoff, &g.s));
  char* out = nullptr;
  check(fredsve_session_info(g.s, &out));
  std::cout << json::parse(take(out)).dump(2) << "\n";
  return 0;
}

int cmd_oracle(const std::string& problem, int n, double tol, double cutoff) {
  SessionGuard g;
  check(fredsve_session_open(problem.c_str(), tol, cutoff, &g.s));
  char* out = nullptr;
  check(fredsve_oracle_csv(g.s, n, &out));
  std::cout << take(out);
  return 0;
}

int cmd_bench(const GridArgs& args) {
  char* summary = nullptr;
  check(fredsve_bench_run(args.merged_config().c_str(), nullptr, &summary));
  std::string text = take(summary);
  std::cout << text;
  int failed_cells = 0;
  for (const auto& cell : json::parse(text)["cells"])
    failed_cells += cell["errors"].get<int>();
  if (failed_cells > 0) {
    std::cerr << "error: " << failed_cells << " grid cell(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_bound(const GridArgs& args) {
  char* out = nullptr;
  check(fredsve_bound_run(args.merged_config().c_str(), &out));
  std::cout << take(out);
  return 0;
}

int cmd_blur2d(const GridArgs& args, int grid_points) {
  char* out = nullptr;
  check(fredsve_blur2d_run(args.merged_config().c_str(), grid_points, &out));
  std::cout << json::parse(take(out)).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-representation solver for first-kind Fredholm "
               "integral equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fredsve_version());

  auto* problems = app.add_subcommand("problems", "Built-in test problems");
  problems->require_subcommand(1);
  problems->add_subcommand("list", "Print the problem names");

  std::string problem, method;
  double alpha = 1e-2, eta = 1.0, tol = 0.0, cutoff = 0.0;
  std::uint64_t seed = 1;
  auto* solve = app.add_subcommand("solve", "Solve one noisy instance");
  solve->add_option("--problem", problem, "problem name")->required();
  solve->add_option("--method", method, "regularization method")
      ->required()
      ->check(CLI::IsMember({"tsve", "tikhonov"}));
  solve->add_option("--alpha", alpha, "noise level (delta = alpha * ||g||)");
  solve->add_option("--eta", eta, "discrepancy-principle safety factor");
  solve->add_option("--seed", seed, "noise seed");
  solve->add_option("--tol", tol, "kernel factorization tolerance");
  solve->add_option("--cutoff", cutoff, "singular value cutoff (relative)");

  std::string sve_problem;
  double sve_tol = 0.0, sve_cutoff = 0.0;
  auto* sve = app.add_subcommand("sve", "Print a problem's singular value expansion");
  sve->add_option("--problem", sve_problem, "problem name")->required();
  sve->add_option("--tol", sve_tol, "kernel factorization tolerance");
  sve->add_option("--cutoff", sve_cutoff, "singular value cutoff (relative)");

  std::string oracle_problem;
  int oracle_n = 400;
  double oracle_tol = 0.0, oracle_cutoff = 0.0;
  auto* oracle = app.add_subcommand(
      "oracle", "Compare singular values against a discrete collocation operator");
  oracle->add_option("--problem", oracle_problem, "problem name")->required();
  oracle->add_option("--n", oracle_n, "quadrature nodes per axis");
  oracle->add_option("--tol", oracle_tol, "kernel factorization tolerance");
  oracle->add_option("--cutoff", oracle_cutoff, "singular value cutoff (relative)");

  GridArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run the benchmark grid");
  bench_args.attach(bench);

  GridArgs bound_args;
  auto* bound = app.add_subcommand("bound", "Median truncation error-bound pairs");
  bound_args.attach(bound);

  GridArgs blur_args;
  int grid_points = 256;
  auto* blur = app.add_subcommand("blur2d", "Two-axis blur reconstruction");
  blur_args.attach(blur, true);
  blur->add_option("--grid", grid_points, "sample points per axis");
  blur_args.eta = 10.0;
  blur_args.alpha = 1e-2;

  CLI11_PARSE(app, argc, argv);

  if (problems->parsed()) return cmd_problems_list();
  if (solve->parsed()) return cmd_solve(problem, method, alpha, eta, seed, tol, cutoff);
  if (sve->parsed()) return cmd_sve(sve_problem, sve_tol, sve_cutoff);
  if (oracle->parsed()) return cmd_oracle(oracle_problem, oracle_n, oracle_tol,
                                          oracle_cutoff);
  if (bench->parsed()) return cmd_bench(bench_args);
  if (bound->parsed()) return cmd_bound(bound_args);
  if (blur->parsed()) return cmd_blur2d(blur_args, grid_points);
  return 1;
}
