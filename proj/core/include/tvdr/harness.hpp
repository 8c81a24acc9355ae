// Experiment engine: wires scenarios, learners, and the oracle into regret
// experiments; fits scaling exponents; serializes problems, solutions, runs,
// and sweep tables.
#pragma once

#include "tvdr/adversary.hpp"
#include "tvdr/meta.hpp"
#include "tvdr/oracle.hpp"
#include "tvdr/types.hpp"

#include <optional>
#include <string>

namespace tvdr {

enum class Algorithm { FlhOgd, AflhOgd, FlhOns, ScReductionAlg, BoxToConvexAlg };
enum class ComparatorKind { OracleOptimal, ProvidedSequence, BestFixed };

struct ExperimentConfig {
  ScenarioSpec scenario;
  Algorithm algorithm = Algorithm::FlhOgd;
  ComparatorKind comparator = ComparatorKind::OracleOptimal;
  std::vector<std::pair<long, double>> sweep;  // (n, C_n) grid for `sweep`
  std::string out;
  std::uint64_t master_seed = 0;
};

struct ExperimentResult {
  RegretTrace trace;
  std::vector<double> predictions;  // per-round scalar predictions
  std::vector<double> comparator;   // realized comparator sequence
  double regret = 0.0;
  double oracle_lambda = 0.0;       // when comparator = OracleOptimal
  long partition_bins = 0;          // key-partition cardinality of the comparator
};

// Runs the scalar online protocol round by round: predict, reveal, suffer,
// update. With comparator = OracleOptimal the oracle is solved once on the
// full stream with the scenario's declared TV budget.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> used_points;
  long excluded = 0;  // non-positive values dropped before the fit
};

// Least-squares fit of log(value) against log(n). Requires >= 4 usable points.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

struct DecompositionProbe {
  long n = 0;
  std::vector<double> per_bin;  // excess of the projected-bin-mean predictor
                                // over the optimal sequence, per bin
  bool second_bin_present = false;
};

// For the closed-form alternating-plateau instance, splits [1, n] into two
// halves and computes, per bin, sum (y - Pi(mean y))^2 - (y - u_t)^2 where
// Pi clips to [-B, B] and u is the certified offline optimum.
DecompositionProbe decomposition_probe_example1(long n);

// Best fixed point in [-B, B] for a squared-loss stream (ternary search).
double best_fixed_point(const std::vector<double>& labels, double B);

// Counter-based per-point seed, stable under sweep-grid extension.
std::uint64_t derive_seed(std::uint64_t master, long n, double c_n);

struct SweepRow {
  long n = 0;
  double c_n = 0.0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  long partition_bins = 0;
  double oracle_lambda = 0.0;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

// ---- serialization (documented JSON schema; see README) ----
std::string problem_to_json(const OracleProblem& p);
OracleProblem problem_from_json(const std::string& text);
std::string solution_to_json(const OracleSolution& s);
OracleSolution solution_from_json(const std::string& text);
std::string scenario_spec_to_json(const ScenarioSpec& s);
ScenarioSpec scenario_spec_from_json(const std::string& text);
ExperimentConfig config_from_json(const std::string& text);
// One JSON record per round plus a trailing summary record.
std::string result_to_jsonl(const ExperimentResult& r);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace tvdr
