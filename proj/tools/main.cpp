// Command-line driver: run experiments, sweep (n, C_n) grids, solve and
// verify oracle problems, emit the closed-form worst-case instance, and fit
// scaling exponents from sweep tables. Exit code 0 iff all audits pass.
#include <CLI11.hpp>

#include "tvdr/harness.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tvdr::Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tvdr::Error("cannot write file: " + path);
  out << text;
}

int cmd_run(const std::string& config_path, const std::string& out, std::uint64_t seed,
            bool seed_set) {
  tvdr::ExperimentConfig cfg = tvdr::config_from_json(read_file(config_path));
  if (seed_set) cfg.scenario.seed = seed;
  if (!out.empty()) cfg.out = out;
  const tvdr::ExperimentResult res = tvdr::run_experiment(cfg);
  const std::string text = tvdr::result_to_jsonl(res);
  if (!cfg.out.empty()) {
    write_file(cfg.out, text);
  } else {
    std::cout << text;
  }
  std::cerr << "regret=" << res.regret << " oracle_lambda=" << res.oracle_lambda
            << " partition_bins=" << res.partition_bins << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, std::uint64_t seed,
              bool seed_set) {
  tvdr::ExperimentConfig cfg = tvdr::config_from_json(read_file(config_path));
  if (seed_set) cfg.master_seed = seed;
  if (!out.empty()) cfg.out = out;
  const auto rows = tvdr::run_sweep(cfg);
  const std::string text = tvdr::sweep_to_csv(rows);
  if (!cfg.out.empty()) {
    write_file(cfg.out, text);
  } else {
    std::cout << text;
  }
  return 0;
}

int cmd_oracle(const std::string& problem_path, const std::string& out, double tol) {
  const tvdr::OracleProblem p = tvdr::problem_from_json(read_file(problem_path));
  const tvdr::OracleSolution sol =
      (p.d == 1 && !p.losses.empty() &&
       std::holds_alternative<tvdr::SquaredScalar>(p.losses.front().kind))
          ? tvdr::solve_1d_squared(p)
          : tvdr::solve_multi(p);
  const std::string text = tvdr::solution_to_json(sol);
  if (!out.empty()) {
    write_file(out, text);
  } else {
    std::cout << text << "\n";
  }
  const bool ok = sol.kkt.pass(tol);
  std::cerr << "lambda=" << sol.lambda << " objective=" << sol.objective
            << " kkt_max_residual=" << sol.kkt.max_residual() << (ok ? " PASS" : " FAIL") << "\n";
  return ok ? 0 : 1;
}

int cmd_verify(const std::string& problem_path, const std::string& solution_path, double tol) {
  const tvdr::OracleProblem p = tvdr::problem_from_json(read_file(problem_path));
  const tvdr::OracleSolution sol = tvdr::solution_from_json(read_file(solution_path));
  const tvdr::KktReport report = tvdr::kkt_check(p, sol, tol);
  const tvdr::StructureReport structures = tvdr::detect_structures(p, sol);
  const tvdr::LambdaLengthAudit audit = tvdr::lambda_length_audit(p, sol, structures);
  std::cout << "kkt_max_residual=" << report.max_residual() << "\n"
            << "structures=" << structures.intervals.size() << "\n"
            << "lambda_length_tightest_ratio=" << audit.tightest_ratio << "\n";
  const bool ok = report.pass(tol) && audit.pass;
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

int cmd_example1(long n, const std::string& out, double tol) {
  const tvdr::Example1Data ex = tvdr::gen_example1(n);
  if (ex.n != ex.requested_n) {
    std::cerr << "requested n=" << ex.requested_n << " rounded down to admissible n=" << ex.n
              << "\n";
  }
  const tvdr::OracleProblem p = ex.problem();
  const tvdr::OracleSolution sol = ex.solution();
  const tvdr::KktReport report = tvdr::kkt_check(p, sol, tol);
  if (!out.empty()) {
    write_file(out, tvdr::problem_to_json(p));
    write_file(out + ".solution.json", tvdr::solution_to_json(sol));
  }
  std::cerr << "n=" << ex.n << " lambda=" << ex.lambda << " C_n=" << ex.C_n
            << " kkt_max_residual=" << report.max_residual() << "\n";
  return report.pass(tol) ? 0 : 1;
}

int cmd_fit(const std::string& csv_path) {
  std::istringstream in(read_file(csv_path));
  std::string line;
  std::getline(in, line);  // header: expects columns n,...,regret as emitted by `sweep`
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) continue;
    pts.emplace_back(std::stod(cells[0]), std::stod(cells[3]));
  }
  const tvdr::FitResult fit = tvdr::fit_exponent(pts);
  std::cout << "slope=" << fit.slope << " intercept=" << fit.intercept << " r2=" << fit.r2
            << " points=" << fit.used_points.size() << " excluded=" << fit.excluded << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TV-budgeted dynamic-regret experiments"};
  app.require_subcommand(1);

  std::string config_path, problem_path, solution_path, csv_path, out;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  long n = 4096;

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  auto* run_seed = run->add_option("--seed", seed, "override scenario seed");
  run->add_option("--out", out, "output path (JSON lines)");

  auto* sweep = app.add_subcommand("sweep", "run an (n, C_n) sweep from a JSON config");
  sweep->add_option("config", config_path, "config file")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed, "override master seed");
  sweep->add_option("--out", out, "output path (CSV)");

  auto* oracle = app.add_subcommand("oracle", "solve and certify an oracle problem file");
  oracle->add_option("problem", problem_path, "problem JSON")->required();
  oracle->add_option("--out", out, "solution output path");
  oracle->add_option("--tol", tol, "certificate tolerance");

  auto* verify = app.add_subcommand("verify", "check a solution file's certificate and audits");
  verify->add_option("problem", problem_path, "problem JSON")->required();
  verify->add_option("solution", solution_path, "solution JSON")->required();
  verify->add_option("--tol", tol, "certificate tolerance");

  auto* example1 = app.add_subcommand("example1", "emit the closed-form worst-case instance");
  example1->add_option("--n", n, "horizon (rounded down to admissible)");
  example1->add_option("--out", out, "problem output path");
  example1->add_option("--tol", tol, "certificate tolerance");

  auto* fit = app.add_subcommand("fit", "fit a log-log exponent on a sweep CSV");
  fit->add_option("csv", csv_path, "sweep CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out, seed, !run_seed->empty());
    if (sweep->parsed()) return cmd_sweep(config_path, out, seed, !sweep_seed->empty());
    if (oracle->parsed()) return cmd_oracle(problem_path, out, tol);
    if (verify->parsed()) return cmd_verify(problem_path, solution_path, tol);
    if (example1->parsed()) return cmd_example1(n, out, tol);
    if (fit->parsed()) return cmd_fit(csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
