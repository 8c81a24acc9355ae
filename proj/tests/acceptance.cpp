// Acceptance gate: ten numbered criteria, one PASS/FAIL line each, exit 0 iff
// all pass. Every tolerance and time budget is pinned here as a constant.
#include "tvdr/harness.hpp"
#include "tvdr/reductions.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tvdr;

namespace {

// ---- pinned tolerances and budgets ----
const double kKktTol = 1e-6;
const double kBruteSlackPerRound = 2.0 * 0.01;  // times n (G + B)
const double kLambdaRelTol = 0.01;
const double kProbeExpLo = 0.15, kProbeExpHi = 0.35;
const double kSweepSlopeLo = 0.20, kSweepSlopeHi = 0.45;
const double kSweepR2Min = 0.90;
const double kBinsSlopeLo = 0.20, kBinsSlopeHi = 0.45;
const double kBridgeHalving = 0.5;
const double kDominationTol = 1e-8;
const double kG = 4.0, kB = 2.0;
const std::uint64_t kMasterSeed = 20260826;

const double kLimitBrute = 5.0;
const double kLimitExample = 2.0;
const double kLimitProbe = 60.0;
const double kLimitInterval = 120.0;
const double kLimitSweep = 600.0;
const double kLimitBridge = 180.0;
const double kLimitConvex = 120.0;
const double kLimitLengthAudit = 120.0;

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  double elapsed = 0.0;
  double limit = 0.0;
  std::string detail;
  std::string digest;  // canonical numeric trace for the determinism check
};

CurvatureInfo squared_curv() { return CurvatureInfo{2.0, 0.0, kG, kG, kB}; }

void put(std::string& digest, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g;", v);
  digest += buf;
}

OracleProblem squared_problem(const std::vector<double>& labels, double c_n) {
  OracleProblem p;
  p.B = kB;
  p.C_n = c_n;
  p.d = 1;
  for (double y : labels) p.losses.push_back(squared_loss(y, squared_curv()));
  return p;
}

std::vector<double> random_labels(long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kG, kG);
  std::vector<double> y(n);
  for (auto& v : y) v = u(rng);
  return y;
}

// Exhaustive reference: DP over a (value, spent-budget) lattice. The lattice
// is a restriction of the feasible set with conservative budget rounding, so
// its optimum upper-bounds the true one.
double constrained_grid_best(const std::vector<double>& y, double c_n, int vgrid, int bgrid) {
  const long n = static_cast<long>(y.size());
  const double vstep = 2.0 * kB / (vgrid - 1);
  const double bstep = c_n > 0 ? c_n / (bgrid - 1) : 0.0;
  auto value = [&](int v) { return -kB + vstep * v; };
  const double kInf = 1e100;
  std::vector<std::vector<double>> dp(bgrid, std::vector<double>(vgrid, kInf));
  for (int v = 0; v < vgrid; ++v) {
    const double d = value(v) - y[0];
    dp[0][v] = d * d;
  }
  for (long t = 1; t < n; ++t) {
    std::vector<std::vector<double>> nx(bgrid, std::vector<double>(vgrid, kInf));
    for (int b = 0; b < bgrid; ++b)
      for (int v = 0; v < vgrid; ++v) {
        if (dp[b][v] >= kInf) continue;
        for (int v2 = 0; v2 < vgrid; ++v2) {
          const double move = std::abs(value(v2) - value(v));
          int bused = 0;
          if (move > 0) {
            if (bstep <= 0) continue;
            bused = static_cast<int>(std::ceil(move / bstep - 1e-12));
          }
          const int b2 = b + bused;
          if (b2 >= bgrid && bused > 0) continue;
          const int bidx = std::min(b2, bgrid - 1);
          const double d = value(v2) - y[t];
          const double cand = dp[b][v] + d * d;
          if (cand < nx[bidx][v2]) nx[bidx][v2] = cand;
        }
      }
    dp = nx;
  }
  double best = kInf;
  for (int b = 0; b < bgrid; ++b)
    for (int v = 0; v < vgrid; ++v) best = std::min(best, dp[b][v]);
  return best;
}

ScenarioSpec walk_spec(long n, std::uint64_t seed, double budget) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::RandomWalkTV;
  spec.n = n;
  spec.curv = squared_curv();
  spec.seed = seed;
  spec.budget = budget;
  return spec;
}

// ---- criterion 1: oracle vs exhaustive reference, plus a large certificate ----
Criterion criterion1() {
  Criterion c{1, "oracle matches the exhaustive lattice program", false, 0, kLimitBrute, "", ""};
  std::mt19937_64 rng(kMasterSeed);
  std::uniform_real_distribution<double> cdist(0.2, 3.0);
  std::uniform_int_distribution<int> ndist(4, 8);
  long bad = 0;
  double worst_gap = -1e300, worst_kkt = 0.0;
  for (int k = 0; k < 200; ++k) {
    const long n = ndist(rng);
    auto y = random_labels(n, kMasterSeed + 1000 + k);
    OracleProblem p = squared_problem(y, cdist(rng));
    OracleSolution sol = solve_1d_squared(p);
    worst_kkt = std::max(worst_kkt, sol.kkt.max_residual());
    const double grid = constrained_grid_best(y, p.C_n, 81, 41);
    const double slack = kBruteSlackPerRound * n * (kG + kB);
    worst_gap = std::max(worst_gap, sol.objective - grid);
    if (!sol.kkt.pass(kKktTol) || sol.objective > grid + slack) ++bad;
  }
  // Certificate quality at a large horizon.
  OracleProblem big = squared_problem(random_labels(5000, kMasterSeed + 77), 6.0);
  OracleSolution bsol = solve_1d_squared(big);
  worst_kkt = std::max(worst_kkt, bsol.kkt.max_residual());
  c.pass = bad == 0 && bsol.kkt.pass(kKktTol);
  std::ostringstream os;
  os << "failures=" << bad << " worst_gap=" << worst_gap << " worst_kkt=" << worst_kkt;
  c.detail = os.str();
  return c;
}

// ---- criterion 2: closed-form instance certificate and dual recovery ----
Criterion criterion2() {
  Criterion c{2, "closed-form instance certifies and the dual is recovered", false, 0,
              kLimitExample, "", ""};
  Example1Data ex = gen_example1(4096);
  OracleProblem p = ex.problem();
  KktReport closed = kkt_check(p, ex.solution());
  OracleSolution sol = solve_1d_squared(p);
  const double rel = std::abs(sol.lambda - ex.lambda) / ex.lambda;
  c.pass = closed.pass(kKktTol) && sol.kkt.pass(kKktTol) && rel < kLambdaRelTol;
  std::ostringstream os;
  os << "closed_kkt=" << closed.max_residual() << " solver_lambda=" << sol.lambda
     << " rel_err=" << rel;
  c.detail = os.str();
  put(c.digest, closed.max_residual());
  put(c.digest, sol.lambda);
  put(c.digest, sol.objective);
  return c;
}

// ---- criterion 3: decomposition probe exponent ----
Criterion criterion3() {
  Criterion c{3, "decomposition probe grows with the expected exponent", false, 0, kLimitProbe,
              "", ""};
  std::vector<std::pair<double, double>> pts;
  for (long n : {4096L, 20736L, 65536L, 160000L}) {
    DecompositionProbe pr = decomposition_probe_example1(n);
    double total = 0.0;
    for (double v : pr.per_bin) total += v;
    pts.push_back({static_cast<double>(pr.n), total});
    put(c.digest, total);
  }
  FitResult f = fit_exponent(pts);
  c.pass = f.slope >= kProbeExpLo && f.slope <= kProbeExpHi;
  std::ostringstream os;
  os << "exponent=" << f.slope << " r2=" << f.r2;
  c.detail = os.str();
  put(c.digest, f.slope);
  return c;
}

// ---- criterion 4: interval regret of the unpruned meta-algorithm ----
Criterion criterion4() {
  Criterion c{4, "interval regret stays logarithmic on every sampled interval", false, 0,
              kLimitInterval, "", ""};
  const long n = 4096;
  const double bound = 10.0 * (kB + kG) * (kB + kG) * std::log(static_cast<double>(n));
  long violations = 0;
  double worst = -1e300;
  for (int stream = 0; stream < 20; ++stream) {
    ExperimentConfig cfg;
    cfg.scenario = walk_spec(n, kMasterSeed + 500 + stream, 4.0);
    cfg.algorithm = Algorithm::FlhOgd;
    cfg.comparator = ComparatorKind::BestFixed;
    ExperimentResult r = run_experiment(cfg);
    Scenario sc = gen_scenario(cfg.scenario);
    std::vector<double> cum(n + 1, 0.0);
    for (long t = 0; t < n; ++t) cum[t + 1] = cum[t] + r.trace.rounds[t].learner_loss;
    std::mt19937_64 rng(kMasterSeed + 900 + stream);
    std::uniform_int_distribution<long> pick(0, n - 1);
    for (int j = 0; j < 50; ++j) {
      long a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      std::vector<double> slice(sc.labels.begin() + a, sc.labels.begin() + b + 1);
      const double w = best_fixed_point(slice, kB);
      double comp = 0.0;
      for (double y : slice) comp += (y - w) * (y - w);
      const double regret = (cum[b + 1] - cum[a]) - comp;
      worst = std::max(worst, regret);
      if (regret > bound) ++violations;
    }
  }
  c.pass = violations == 0;
  std::ostringstream os;
  os << "worst_interval_regret=" << worst << " bound=" << bound
     << " violations=" << violations;
  c.detail = os.str();
  put(c.digest, worst);
  return c;
}

// Shared between criteria 5 and 9.
std::vector<SweepRow> run_scaling_sweep() {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::AflhOgd;
  cfg.comparator = ComparatorKind::OracleOptimal;
  cfg.master_seed = kMasterSeed;
  cfg.scenario.kind = ScenarioKind::RandomWalkTV;
  cfg.scenario.curv = squared_curv();
  for (long e = 12; e <= 18; ++e) cfg.sweep.push_back({1L << e, 4.0});
  return run_sweep(cfg);
}

// ---- criterion 5: regret scaling of the pruned meta-algorithm ----
Criterion criterion5(const std::vector<SweepRow>& rows) {
  Criterion c{5, "dynamic regret scales sublinearly with the expected exponent", false, 0,
              kLimitSweep, "", ""};
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    pts.push_back({static_cast<double>(r.n), r.regret});
    put(c.digest, r.regret);
  }
  FitResult f = fit_exponent(pts);
  c.pass = f.slope >= kSweepSlopeLo && f.slope <= kSweepSlopeHi && f.r2 >= kSweepR2Min;
  std::ostringstream os;
  os << "slope=" << f.slope << " r2=" << f.r2;
  c.detail = os.str();
  put(c.digest, f.slope);
  put(c.digest, f.r2);
  return c;
}

// ---- criterion 6: per-coordinate reduction bridge and regret decay ----
Criterion criterion6() {
  Criterion c{6, "coordinate reduction bridges every round and regret density halves", false, 0,
              kLimitBridge, "", ""};
  const int d = 4;
  const double H = 1.0;
  auto run_one = [&](long n, bool& bridge_ok) {
    std::mt19937_64 rng(kMasterSeed + 4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec base(d);
    base << 1.0, -0.5, 0.25, 0.8;
    std::vector<Vec> centers(n);
    Vec mean = Vec::Zero(d);
    for (long t = 0; t < n; ++t) {
      Vec ct(d);
      for (int i = 0; i < d; ++i) ct[i] = std::clamp(base[i] + 0.3 * u(rng), -kB, kB);
      centers[t] = ct;
      mean += ct / static_cast<double>(n);
    }
    ScReduction red = sc_reduction_init(d, H, kB, 2.0 * kB, Pruning::None);
    bridge_ok = true;
    double learner = 0.0, comp = 0.0;
    for (long t = 0; t < n; ++t) {
      Vec x = red.predict();
      const Vec ct = centers[t];
      LossSpec f;
      f.kind = GeneralSmooth{[ct](const Vec& z) { return 0.5 * (z - ct).squaredNorm(); },
                             [ct](const Vec& z) { return Vec(z - ct); }};
      f.curv.H = H;
      learner += eval_loss(f, x);
      comp += 0.5 * (mean - ct).squaredNorm();
      if (!sc_regret_bridge_check(f, x, mean, H)) bridge_ok = false;
      red.observe(x, eval_grad(f, x));
    }
    return learner - comp;
  };
  bool bridge_small = true, bridge_large = true;
  const double r_small = run_one(2048, bridge_small);
  const double r_large = run_one(8192, bridge_large);
  const double density_small = r_small / 2048.0;
  const double density_large = r_large / 8192.0;
  c.pass = bridge_small && bridge_large && density_large <= kBridgeHalving * density_small;
  std::ostringstream os;
  os << "bridge_ok=" << (bridge_small && bridge_large) << " density_2048=" << density_small
     << " density_8192=" << density_large;
  c.detail = os.str();
  put(c.digest, r_small);
  put(c.digest, r_large);
  return c;
}

// ---- criterion 7: surrogate domination and the convex-body audit ----
Criterion criterion7() {
  Criterion c{7, "surrogate domination and convex-body audits hold on every round", false, 0,
              kLimitConvex, "", ""};
  const int d = 3;
  const long n = 4096;
  const double alpha = 0.125;  // admissible for the squared loss on these sets
  long dom_violations = 0, audit_rounds = 0;
  double final_norm_sum = 0.0;
  for (int which = 0; which < 2; ++which) {
    DecisionSet W = which == 0 ? l2ball_set(1.0, d) : l1ball_set(1.0, d);
    DecisionSet D = box_set(W.circumscribing_box_radius(), d);
    // Inner learner: pruned meta with Newton-step experts on the box.
    CurvatureInfo ec;
    ec.alpha = alpha;
    ec.G = 6.0;
    ec.G_inf = 6.0;
    ec.B = 1.0;
    const double zeta = ons_zeta(ec, d);
    MetaState inner = flh_init(D, flh_meta_rate(ec, GameKind::ExpConcave, d), Pruning::LogPool,
                               [D, zeta] { return ExpertState{ons_init(D, zeta)}; });
    BoxToConvex red = box_to_convex_init(
        W, 2.0 * (1.0 + std::sqrt(static_cast<double>(d))),
        [&inner] { return flh_predict(inner); },
        [&inner, alpha](const LossSpec& s) {
          Vec x = flh_predict(inner);
          flh_update(inner, ec_surrogate(x, eval_grad(s, x), alpha));
        });
    std::mt19937_64 rng(kMasterSeed + 7000 + which);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CurvatureInfo qc{2.0, alpha, 6.0, 6.0, 1.0};
    for (long t = 0; t < n; ++t) {
      Vec ct(d);
      for (int i = 0; i < d; ++i) ct[i] = u(rng);
      ct = project(W, ct);
      LossSpec f = quadratic_surrogate(ct, qc);
      BoxToConvexRound r = box_to_convex_round(red, f);  // throws on audit failure
      ++audit_rounds;
      // Domination of the rank-one surrogate built at the played point:
      // f(x_t) - f(w) <= s(x_t) - s(w) for exp-concave f.
      LossSpec s = ec_surrogate(r.played, eval_grad(f, r.played), alpha);
      for (int j = 0; j < 5; ++j) {
        Vec w(d);
        for (int i = 0; i < d; ++i) w[i] = u(rng);
        w = project(W, w);
        const double lhs = eval_loss(f, r.played) - eval_loss(f, w);
        const double rhs = eval_loss(s, r.played) - eval_loss(s, w);
        if (lhs > rhs + kDominationTol) ++dom_violations;
      }
      if (t == n - 1) final_norm_sum += r.played.norm();
    }
  }
  c.pass = dom_violations == 0 && audit_rounds == 2 * n;
  std::ostringstream os;
  os << "audited_rounds=" << audit_rounds << " domination_violations=" << dom_violations;
  c.detail = os.str();
  put(c.digest, static_cast<double>(dom_violations));
  put(c.digest, final_norm_sum);
  return c;
}

// ---- criterion 8: dual-length audit across seeds and the closed form ----
Criterion criterion8() {
  Criterion c{8, "the dual never exceeds the plateau-length bound", false, 0, kLimitLengthAudit,
              "", ""};
  std::mt19937_64 rng(kMasterSeed + 31);
  std::uniform_real_distribution<double> cdist(0.3, 4.0);
  long failures = 0;
  double tightest = 0.0;
  for (int k = 0; k < 200; ++k) {
    auto y = random_labels(256, kMasterSeed + 2000 + k);
    OracleProblem p = squared_problem(y, cdist(rng));
    OracleSolution sol = solve_1d_squared(p);
    if (!sol.kkt.pass(kKktTol)) {
      ++failures;
      continue;
    }
    StructureReport rep = detect_structures(p, sol);
    LambdaLengthAudit audit = lambda_length_audit(p, sol, rep);
    tightest = std::max(tightest, audit.tightest_ratio);
    if (!audit.pass) ++failures;
  }
  Example1Data ex = gen_example1(4096);
  OracleProblem p = ex.problem();
  OracleSolution sol = ex.solution();
  StructureReport rep = detect_structures(p, sol);
  LambdaLengthAudit audit = lambda_length_audit(p, sol, rep);
  tightest = std::max(tightest, audit.tightest_ratio);
  if (!audit.pass) ++failures;
  c.pass = failures == 0;
  std::ostringstream os;
  os << "failures=" << failures << " tightest_ratio=" << tightest;
  c.detail = os.str();
  put(c.digest, static_cast<double>(failures));
  put(c.digest, tightest);
  return c;
}

// ---- criterion 9: partition cardinality scaling ----
Criterion criterion9(const std::vector<SweepRow>& rows) {
  Criterion c{9, "key-partition cardinality scales with the expected exponent", false, 0,
              kLimitSweep, "", ""};
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    pts.push_back({static_cast<double>(r.n), static_cast<double>(r.partition_bins)});
    put(c.digest, static_cast<double>(r.partition_bins));
  }
  FitResult f = fit_exponent(pts);
  c.pass = f.slope >= kBinsSlopeLo && f.slope <= kBinsSlopeHi;
  std::ostringstream os;
  os << "slope=" << f.slope << " r2=" << f.r2;
  c.detail = os.str();
  put(c.digest, f.slope);
  return c;
}

template <typename F>
Criterion timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c = f();
  c.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.elapsed > c.limit) {
    c.pass = false;
    c.detail += " [time budget exceeded]";
  }
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  results.push_back(timed(criterion1));
  results.push_back(timed(criterion2));
  results.push_back(timed(criterion3));
  results.push_back(timed(criterion4));
  std::vector<SweepRow> rows;
  results.push_back(timed([&rows] {
    rows = run_scaling_sweep();
    return criterion5(rows);
  }));
  results.push_back(timed(criterion6));
  results.push_back(timed(criterion7));
  results.push_back(timed(criterion8));
  results.push_back(timed([&rows] { return criterion9(rows); }));

  // Criterion 10: rerun criteria 2-9 and require byte-identical numeric traces.
  Criterion c10{10, "criteria 2-9 replay byte-identically", false, 0, kLimitSweep, "", ""};
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<SweepRow> rows2 = run_scaling_sweep();
    std::vector<Criterion> replay;
    replay.push_back(criterion2());
    replay.push_back(criterion3());
    replay.push_back(criterion4());
    replay.push_back(criterion5(rows2));
    replay.push_back(criterion6());
    replay.push_back(criterion7());
    replay.push_back(criterion8());
    replay.push_back(criterion9(rows2));
    long mismatches = 0;
    for (size_t i = 0; i < replay.size(); ++i) {
      if (replay[i].digest != results[i + 1].digest) ++mismatches;
    }
    c10.pass = mismatches == 0;
    c10.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os << "digest_mismatches=" << mismatches;
    c10.detail = os.str();
  }
  results.push_back(c10);

  bool all = true;
  for (const auto& c : results) {
    all = all && c.pass;
    std::printf("criterion %2d [%s] %-68s %s (%.2fs) %s\n", c.id, c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.pass ? " " : "!", c.elapsed, c.detail.c_str());
  }
  std::printf("acceptance: %s\n", all ? "ALL PASS" : "FAILURES PRESENT");
  return all ? 0 : 1;
}
