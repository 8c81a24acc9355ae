// Label-stream and comparator generators, including the explicit alternating-
// plateau construction whose offline optimum admits a closed-form KKT
// certificate (G = 4, B = 2, blocks of length n^{3/4}).
#pragma once

#include "tvdr/oracle.hpp"
#include "tvdr/types.hpp"

#include <cstdint>

namespace tvdr {

// Closed-form worst-case instance. The optimal sequence alternates between
// plateaus at B - 1/(2 n^{3/4}) and B in blocks of length n^{3/4}; the dual
// is lambda = n^{3/4} - 2 and the full certificate is emitted in closed form.
struct Example1Data {
  long n = 0;           // admissible horizon actually used (rounded down)
  long requested_n = 0;
  double G = 4.0;
  double B = 2.0;
  double lambda = 0.0;
  double C_n = 0.0;     // TV of the optimal sequence
  std::vector<double> labels;
  std::vector<double> u;
  std::vector<double> s;           // size n-1
  std::vector<double> gamma_plus;  // size n
  // gamma_minus is identically zero

  OracleProblem problem() const;
  OracleSolution solution() const;
  CurvatureInfo curv() const;
};

// Requires n >= 16; n is rounded down to the nearest m^4 with m even.
Example1Data gen_example1(long n);

enum class ScenarioKind { Example1, PiecewiseConstant, SinusoidDrift, RandomWalkTV };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::RandomWalkTV;
  long n = 0;
  CurvatureInfo curv;      // G and B bound labels and the comparator box
  std::uint64_t seed = 0;
  // PiecewiseConstant
  long m_switches = 0;
  double noise_eps = 0.0;
  // SinusoidDrift
  double freq = 1.0;       // full periods over the horizon
  double amplitude = 1.0;
  // RandomWalkTV
  double budget = 0.0;
};

struct Scenario {
  std::vector<LossSpec> losses;  // squared losses over [-B, B]
  std::vector<double> labels;
  std::vector<double> comparator;
  double tv_budget = 0.0;  // declared TV budget of the comparator
};

// Deterministic given the seed; the comparator's TV accounting is exact.
Scenario gen_scenario(const ScenarioSpec& spec);

}  // namespace tvdr
