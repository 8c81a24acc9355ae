// Offline TV-budgeted comparator oracle: solve
//   min  sum_t f_t(u_t)   s.t.  sum_t ||u_{t+1} - u_t||_1 <= C_n,  ||u_t||_inf <= B
// with a KKT certificate (dual lambda, subgradient signs s, boundary
// multipliers gamma), plus the greedy key partition and plateau-structure
// diagnostics computed from the optimal sequence.
#pragma once

#include "tvdr/types.hpp"

namespace tvdr {

struct OracleProblem {
  std::vector<LossSpec> losses;  // one per round
  double C_n = 0.0;              // TV budget
  double B = 1.0;                // box radius
  int d = 1;

  long n() const { return static_cast<long>(losses.size()); }
};

struct KktReport {
  double stationarity = 0.0;      // max |grad_t - lambda (s_t - s_{t-1}) - gamma^- + gamma^+|
  double comp_slack_tv = 0.0;     // lambda * |TV(u) - C_n| when the budget binds
  double comp_slack_box = 0.0;    // max |gamma^-(u+B)|, |gamma^+(u-B)|
  double dual_feas = 0.0;         // max(0, -lambda, -gamma)
  double s_box = 0.0;             // max(0, ||s||_inf - 1)
  double sign_consistency = 0.0;  // max |s_t - sign(u_{t+1}-u_t)| over moving steps
  double primal_tv = 0.0;         // max(0, TV(u) - C_n)
  double primal_box = 0.0;        // max(0, ||u||_inf - B)

  double max_residual() const;
  bool pass(double tol) const { return max_residual() <= tol; }
};

struct OracleSolution {
  Mat u;            // n x d optimal sequence
  double lambda = 0.0;
  Mat s;            // (n-1) x d subgradient signs, s_0 = s_n = 0 implied
  Mat gamma_plus;   // n x d upper-boundary multipliers
  Mat gamma_minus;  // n x d lower-boundary multipliers
  double objective = 0.0;  // sum_t f_t(u_t)
  KktReport kkt;
};

// Exact 1-D total-variation proximal operator:
//   argmin_u 1/2 sum (u_t - y_t)^2 + lam * sum |u_{t+1} - u_t|.
std::vector<double> tv_prox_1d(const std::vector<double>& y, double lam);

// d = 1, all-squared-loss fast path. lambda is reported on the half-weighted
// objective scale (the scale on which the TV prox operates).
OracleSolution solve_1d_squared(const OracleProblem& problem);

// General smooth losses, any d: accelerated proximal gradient on the
// penalized objective inside a lambda bisection.
OracleSolution solve_multi(const OracleProblem& problem);

KktReport kkt_check(const OracleProblem& problem, const OracleSolution& sol,
                    double tol = 1e-6);

struct KeyPartition {
  std::vector<std::pair<long, long>> bins;  // 1-based inclusive [i_s, i_t]
  std::vector<double> bin_tv;               // intra-bin TV per bin
  long M() const { return static_cast<long>(bins.size()); }
};

// Greedy left-to-right partition: close the current bin [i_s, i_t] as soon as
// extending it to i_t + 1 would push intra-bin TV above B/sqrt(i_t - i_s + 2).
KeyPartition key_partition(const Mat& u, double B);

struct StructureInterval {
  long a = 0, b = 0;   // 1-based inclusive plateau
  int coord = 0;
  int kind = 0;        // 1: plateau above both neighbors; 2: below both
  double value = 0.0;  // the constant plateau level
  long length() const { return b - a + 1; }
};

struct BinGaps {
  long i_s = 0, i_t = 0;
  std::vector<double> gap_to_minus_b;  // per coordinate: min_j |u_j - (-B)|
  std::vector<double> gap_to_plus_b;   // per coordinate: min_j |u_j - B|
};

struct StructureReport {
  std::vector<StructureInterval> intervals;
  std::vector<BinGaps> bin_gaps;  // aligned with key_partition bins
};

// Classifies maximal interior constant runs of the optimal sequence and
// reports per-bin minimum distances to the box boundary.
StructureReport detect_structures(const OracleProblem& problem, const OracleSolution& sol,
                                  double tol = 1e-8);

struct LambdaLengthAudit {
  bool pass = true;
  double tightest_ratio = 0.0;  // max over intervals of lambda / bound
  long violations = 0;
};

// For every detected plateau structure of length l, checks
// lambda <= (B+G) l / 2 (d = 1 squared losses) or lambda <= G_inf l / 2.
LambdaLengthAudit lambda_length_audit(const OracleProblem& problem,
                                      const OracleSolution& sol,
                                      const StructureReport& report);

// Total variation sum_t ||u_{t+1} - u_t||_1 of a sequence (rows = time).
double total_variation(const Mat& u);

}  // namespace tvdr
