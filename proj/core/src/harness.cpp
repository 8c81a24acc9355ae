#include "tvdr/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <sstream>

namespace tvdr {

namespace {

using nlohmann::json;

MetaState make_scalar_learner(Algorithm alg, const CurvatureInfo& curv) {
  const DecisionSet interval = box_set(curv.B, 1);
  switch (alg) {
    case Algorithm::FlhOgd:
    case Algorithm::AflhOgd: {
      const double zeta = flh_meta_rate(curv, GameKind::Squared);
      const Pruning pr = alg == Algorithm::AflhOgd ? Pruning::LogPool : Pruning::None;
      return flh_init(interval, zeta, pr, [interval]() -> ExpertState {
        return ogd_init(interval, OgdStepRule::InverseHalfT);
      });
    }
    case Algorithm::FlhOns: {
      // Squared losses on [-B, B] with |y| <= G are 1/(2 (G+B)^2) exp-concave
      // with gradients bounded by 2 (G+B).
      CurvatureInfo ec = curv;
      ec.alpha = 1.0 / (2.0 * (curv.G + curv.B) * (curv.G + curv.B));
      ec.G = 2.0 * (curv.G + curv.B);
      const double zeta_meta = flh_meta_rate(ec, GameKind::ExpConcave, 1);
      const double zeta_ons = ons_zeta(ec, 1);
      return flh_init(interval, zeta_meta, Pruning::None, [interval, zeta_ons]() -> ExpertState {
        return ons_init(interval, zeta_ons);
      });
    }
    default:
      throw Error("make_scalar_learner: algorithm not available for scalar streams");
  }
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FlhOgd: return "flh_ogd";
    case Algorithm::AflhOgd: return "aflh_ogd";
    case Algorithm::FlhOns: return "flh_ons";
    case Algorithm::ScReductionAlg: return "sc_reduction";
    case Algorithm::BoxToConvexAlg: return "box_to_convex";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& s) {
  if (s == "flh_ogd") return Algorithm::FlhOgd;
  if (s == "aflh_ogd") return Algorithm::AflhOgd;
  if (s == "flh_ons") return Algorithm::FlhOns;
  if (s == "sc_reduction") return Algorithm::ScReductionAlg;
  if (s == "box_to_convex") return Algorithm::BoxToConvexAlg;
  throw Error("unknown algorithm: " + s);
}

ComparatorKind comparator_from_name(const std::string& s) {
  if (s == "oracle_optimal") return ComparatorKind::OracleOptimal;
  if (s == "provided_sequence") return ComparatorKind::ProvidedSequence;
  if (s == "best_fixed") return ComparatorKind::BestFixed;
  throw Error("unknown comparator: " + s);
}

std::string scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Example1: return "example1";
    case ScenarioKind::PiecewiseConstant: return "piecewise_constant";
    case ScenarioKind::SinusoidDrift: return "sinusoid_drift";
    case ScenarioKind::RandomWalkTV: return "random_walk_tv";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_name(const std::string& s) {
  if (s == "example1") return ScenarioKind::Example1;
  if (s == "piecewise_constant") return ScenarioKind::PiecewiseConstant;
  if (s == "sinusoid_drift") return ScenarioKind::SinusoidDrift;
  if (s == "random_walk_tv") return ScenarioKind::RandomWalkTV;
  throw Error("unknown scenario kind: " + s);
}

json curv_to_json(const CurvatureInfo& c) {
  return json{{"H", c.H}, {"alpha", c.alpha}, {"G", c.G}, {"G_inf", c.G_inf}, {"B", c.B}};
}

CurvatureInfo curv_from_json(const json& j) {
  CurvatureInfo c;
  c.H = j.value("H", 0.0);
  c.alpha = j.value("alpha", 0.0);
  c.G = j.value("G", 0.0);
  c.G_inf = j.value("G_inf", 0.0);
  c.B = j.value("B", 0.0);
  return c;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, long n, double c_n) {
  // splitmix64 over a counter formed from the sweep coordinates.
  std::uint64_t z = master ^ (static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ULL);
  std::uint64_t cbits;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&cbits, &c_n, sizeof(cbits));
  z ^= cbits + 0x9E3779B97F4A7C15ULL + (z << 6) + (z >> 2);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double best_fixed_point(const std::vector<double>& labels, double B) {
  auto value = [&](double w) {
    double v = 0.0;
    for (double y : labels) v += (y - w) * (y - w);
    return v;
  };
  double lo = -B, hi = B;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (value(m1) <= value(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 0.5 * (lo + hi);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Scenario sc = gen_scenario(cfg.scenario);
  const long n = static_cast<long>(sc.losses.size());
  CurvatureInfo curv = sc.losses.front().curv;

  ExperimentResult res;
  res.predictions.reserve(n);

  // Comparator sequence.
  switch (cfg.comparator) {
    case ComparatorKind::OracleOptimal: {
      OracleProblem p;
      p.losses = sc.losses;
      p.C_n = sc.tv_budget;
      p.B = curv.B;
      p.d = 1;
      const OracleSolution sol = solve_1d_squared(p);
      if (!sol.kkt.pass(1e-6)) {
        throw Error("run_experiment: oracle certificate failed at tolerance 1e-6");
      }
      res.comparator.resize(n);
      for (long t = 0; t < n; ++t) res.comparator[t] = sol.u(t, 0);
      res.oracle_lambda = sol.lambda;
      res.partition_bins = key_partition(sol.u, p.B).M();
      break;
    }
    case ComparatorKind::ProvidedSequence:
      res.comparator = sc.comparator;
      break;
    case ComparatorKind::BestFixed: {
      const double w = best_fixed_point(sc.labels, curv.B);
      res.comparator.assign(n, w);
      break;
    }
  }
  if (cfg.comparator != ComparatorKind::OracleOptimal) {
    Mat cm(n, 1);
    for (long t = 0; t < n; ++t) cm(t, 0) = res.comparator[t];
    res.partition_bins = key_partition(cm, curv.B).M();
  }

  MetaState learner = make_scalar_learner(cfg.algorithm, curv);
  Vec w(1);
  double tv = 0.0;
  for (long t = 0; t < n; ++t) {
    const Vec x = flh_predict(learner);
    res.predictions.push_back(x[0]);
    const double lx = eval_loss(sc.losses[t], x);
    w[0] = res.comparator[t];
    const double lw = eval_loss(sc.losses[t], w);
    if (t > 0) tv += std::abs(res.comparator[t] - res.comparator[t - 1]);
    res.trace.add(t + 1, lx, lw, tv);
    flh_update(learner, sc.losses[t]);
  }
  res.regret = res.trace.final_regret();
  return res;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
  FitResult fit;
  for (const auto& [n, v] : points) {
    if (v > 0 && n > 0) {
      fit.used_points.emplace_back(n, v);
    } else {
      fit.excluded += 1;
    }
  }
  if (fit.used_points.size() < 4) {
    throw Error("fit_exponent: need at least 4 positive points, have " +
                std::to_string(fit.used_points.size()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(fit.used_points.size());
  for (const auto& [n, v] : fit.used_points) {
    const double x = std::log(n), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double cxy = sxy - sx * sy / m;
  const double vy = syy - sy * sy / m;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.r2 = vy > 0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return fit;
}

DecompositionProbe decomposition_probe_example1(long n) {
  const Example1Data ex = gen_example1(n);
  DecompositionProbe probe;
  probe.n = ex.n;

  auto bin_value = [&](long a, long b) {  // 1-based inclusive
    double mean = 0.0;
    for (long t = a; t <= b; ++t) mean += ex.labels[t - 1];
    mean /= static_cast<double>(b - a + 1);
    const double proj = std::clamp(mean, -ex.B, ex.B);
    double v = 0.0;
    for (long t = a; t <= b; ++t) {
      const double y = ex.labels[t - 1];
      v += (y - proj) * (y - proj) - (y - ex.u[t - 1]) * (y - ex.u[t - 1]);
    }
    return v;
  };

  const long mid = ex.n / 2;
  if (mid >= 1 && mid < ex.n) {
    probe.per_bin.push_back(bin_value(1, mid));
    probe.per_bin.push_back(bin_value(mid + 1, ex.n));
    probe.second_bin_present = true;
  } else {
    probe.per_bin.push_back(bin_value(1, ex.n));
    probe.per_bin.push_back(0.0);
    probe.second_bin_present = false;
  }
  return probe;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepRow> rows;
  for (const auto& [n, c_n] : cfg.sweep) {
    ExperimentConfig point = cfg;
    point.scenario.n = n;
    point.scenario.budget = c_n;
    point.scenario.seed = derive_seed(cfg.master_seed, n, c_n);
    const ExperimentResult res = run_experiment(point);
    SweepRow row;
    row.n = n;
    row.c_n = c_n;
    row.seed = point.scenario.seed;
    row.regret = res.regret;
    row.partition_bins = res.partition_bins;
    row.oracle_lambda = res.oracle_lambda;
    rows.push_back(row);
  }
  return rows;
}

// ---- serialization ----

std::string problem_to_json(const OracleProblem& p) {
  json j;
  j["d"] = p.d;
  j["B"] = p.B;
  j["C_n"] = p.C_n;
  json losses = json::array();
  for (const auto& l : p.losses) {
    json jl;
    if (const auto* sq = std::get_if<SquaredScalar>(&l.kind)) {
      jl["kind"] = "squared_scalar";
      jl["label"] = sq->label;
    } else if (const auto* q = std::get_if<QuadraticSurrogate>(&l.kind)) {
      jl["kind"] = "quadratic_surrogate";
      jl["center"] = std::vector<double>(q->center.data(), q->center.data() + q->center.size());
    } else {
      throw Error("problem_to_json: general losses are not serializable");
    }
    jl["curv"] = curv_to_json(l.curv);
    losses.push_back(std::move(jl));
  }
  j["losses"] = std::move(losses);
  return j.dump(2);
}

OracleProblem problem_from_json(const std::string& text) {
  const json j = json::parse(text);
  OracleProblem p;
  p.d = j.at("d").get<int>();
  p.B = j.at("B").get<double>();
  p.C_n = j.at("C_n").get<double>();
  for (const auto& jl : j.at("losses")) {
    const CurvatureInfo curv = jl.contains("curv") ? curv_from_json(jl["curv"]) : CurvatureInfo{};
    const std::string kind = jl.at("kind").get<std::string>();
    if (kind == "squared_scalar") {
      LossSpec l;
      l.kind = SquaredScalar{jl.at("label").get<double>()};
      l.curv = curv;
      p.losses.push_back(std::move(l));
    } else if (kind == "quadratic_surrogate") {
      const auto c = jl.at("center").get<std::vector<double>>();
      Vec center(c.size());
      for (size_t i = 0; i < c.size(); ++i) center[i] = c[i];
      p.losses.push_back(quadratic_surrogate(center, curv));
    } else {
      throw Error("problem_from_json: unknown loss kind " + kind);
    }
  }
  return p;
}

namespace {
json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}
Mat mat_from_json(const json& j) {
  const long rows = static_cast<long>(j.size());
  if (rows == 0) return Mat(0, 0);
  const long cols = static_cast<long>(j[0].size());
  Mat m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}
}  // namespace

std::string solution_to_json(const OracleSolution& s) {
  json j;
  j["lambda"] = s.lambda;
  j["objective"] = s.objective;
  j["u"] = mat_to_json(s.u);
  j["s"] = mat_to_json(s.s);
  j["gamma_plus"] = mat_to_json(s.gamma_plus);
  j["gamma_minus"] = mat_to_json(s.gamma_minus);
  j["kkt"] = json{{"stationarity", s.kkt.stationarity},
                  {"comp_slack_tv", s.kkt.comp_slack_tv},
                  {"comp_slack_box", s.kkt.comp_slack_box},
                  {"dual_feas", s.kkt.dual_feas},
                  {"s_box", s.kkt.s_box},
                  {"sign_consistency", s.kkt.sign_consistency},
                  {"primal_tv", s.kkt.primal_tv},
                  {"primal_box", s.kkt.primal_box}};
  return j.dump(2);
}

OracleSolution solution_from_json(const std::string& text) {
  const json j = json::parse(text);
  OracleSolution s;
  s.lambda = j.at("lambda").get<double>();
  s.objective = j.value("objective", 0.0);
  s.u = mat_from_json(j.at("u"));
  s.s = mat_from_json(j.at("s"));
  s.gamma_plus = mat_from_json(j.at("gamma_plus"));
  s.gamma_minus = mat_from_json(j.at("gamma_minus"));
  return s;
}

std::string scenario_spec_to_json(const ScenarioSpec& s) {
  json j;
  j["kind"] = scenario_kind_name(s.kind);
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["curv"] = curv_to_json(s.curv);
  j["m_switches"] = s.m_switches;
  j["noise_eps"] = s.noise_eps;
  j["freq"] = s.freq;
  j["amplitude"] = s.amplitude;
  j["budget"] = s.budget;
  return j.dump(2);
}

ScenarioSpec scenario_spec_from_json(const std::string& text) {
  const json j = json::parse(text);
  ScenarioSpec s;
  s.kind = scenario_kind_from_name(j.at("kind").get<std::string>());
  s.n = j.at("n").get<long>();
  s.seed = j.value("seed", 0ULL);
  if (j.contains("curv")) s.curv = curv_from_json(j["curv"]);
  s.m_switches = j.value("m_switches", 0L);
  s.noise_eps = j.value("noise_eps", 0.0);
  s.freq = j.value("freq", 1.0);
  s.amplitude = j.value("amplitude", 1.0);
  s.budget = j.value("budget", 0.0);
  return s;
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  cfg.scenario = scenario_spec_from_json(j.at("scenario").dump());
  cfg.algorithm = algorithm_from_name(j.value("algorithm", "flh_ogd"));
  cfg.comparator = comparator_from_name(j.value("comparator", "oracle_optimal"));
  cfg.master_seed = j.value("master_seed", 0ULL);
  cfg.out = j.value("out", "");
  if (j.contains("sweep")) {
    for (const auto& row : j["sweep"]) {
      cfg.sweep.emplace_back(row[0].get<long>(), row[1].get<double>());
    }
  }
  return cfg;
}

std::string result_to_jsonl(const ExperimentResult& r) {
  std::ostringstream out;
  for (size_t i = 0; i < r.trace.rounds.size(); ++i) {
    const auto& rr = r.trace.rounds[i];
    json j{{"round", rr.t},
           {"prediction", r.predictions[i]},
           {"learner_loss", rr.learner_loss},
           {"comparator_loss", rr.comparator_loss},
           {"cum_regret", rr.cum_regret},
           {"comparator_tv", rr.comparator_tv}};
    out << j.dump() << "\n";
  }
  json summary{{"summary", true},
               {"n", r.trace.n()},
               {"regret", r.regret},
               {"oracle_lambda", r.oracle_lambda},
               {"partition_bins", r.partition_bins}};
  out << summary.dump() << "\n";
  return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "n,c_n,seed,regret,partition_bins,oracle_lambda\n";
  for (const auto& r : rows) {
    // json dump gives shortest round-trip decimal formatting
    json vals = json::array({r.c_n, r.regret, r.oracle_lambda});
    out << r.n << "," << vals[0].dump() << "," << r.seed << "," << vals[1].dump() << ","
        << r.partition_bins << "," << vals[2].dump() << "\n";
  }
  return out.str();
}

}  // namespace tvdr
