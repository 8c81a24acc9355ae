#include "tvdr/adversary.hpp"

#include <cmath>
#include <random>

namespace tvdr {

namespace {

// Largest even m with m^4 <= n.
long admissible_root(long n) {
  long m = static_cast<long>(std::floor(std::pow(static_cast<double>(n), 0.25) + 1e-9));
  while (m * m * m * m > n) --m;
  if (m % 2 == 1) --m;
  return m;
}

}  // namespace

CurvatureInfo Example1Data::curv() const {
  CurvatureInfo c;
  c.G = G;
  c.B = B;
  c.H = 2.0;
  return c;
}

OracleProblem Example1Data::problem() const {
  OracleProblem p;
  p.C_n = C_n;
  p.B = B;
  p.d = 1;
  const CurvatureInfo c = curv();
  p.losses.reserve(n);
  for (long t = 0; t < n; ++t) p.losses.push_back(squared_loss(labels[t], c));
  return p;
}

OracleSolution Example1Data::solution() const {
  OracleSolution sol;
  sol.lambda = lambda;
  sol.u = Mat(n, 1);
  sol.s = Mat(n - 1, 1);
  sol.gamma_plus = Mat(n, 1);
  sol.gamma_minus = Mat::Zero(n, 1);
  for (long t = 0; t < n; ++t) {
    sol.u(t, 0) = u[t];
    sol.gamma_plus(t, 0) = gamma_plus[t];
  }
  for (long t = 0; t < n - 1; ++t) sol.s(t, 0) = s[t];
  for (long t = 0; t < n; ++t) {
    const double d = labels[t] - u[t];
    sol.objective += d * d;
  }
  return sol;
}

Example1Data gen_example1(long n_requested) {
  if (n_requested < 16) throw Error("gen_example1: n must be at least 16");
  const long m = admissible_root(n_requested);
  if (m < 2) throw Error("gen_example1: no admissible horizon below the requested n");
  const long n = m * m * m * m;
  const long L = m * m * m;  // block length n^{3/4}

  Example1Data ex;
  ex.requested_n = n_requested;
  ex.n = n;
  const double B = ex.B, G = ex.G;
  const double nd = static_cast<double>(n);
  const double Ld = static_cast<double>(L);
  const double delta = 1.0 / (2.0 * Ld);
  const double low = B - delta;
  const double edge_dip = (Ld - 2.0) / nd;

  ex.lambda = Ld - 2.0;
  ex.C_n = (m - 1) * delta;
  ex.labels.assign(n, 0.0);
  ex.u.assign(n, 0.0);
  ex.s.assign(n - 1, 0.0);
  ex.gamma_plus.assign(n, 0.0);

  // Plateau values (1-based block boundaries).
  for (long k = 0; k < m / 2; ++k) {
    for (long j = 2 * k * L + 1; j <= (2 * k + 1) * L; ++j) ex.u[j - 1] = low;
    for (long j = (2 * k + 1) * L + 1; j <= (2 * k + 2) * L; ++j) ex.u[j - 1] = B;
  }

  // Labels. First low block dips by (1 - 2/n) interior (the sign variable
  // starts from 0 there); later low blocks dip by 2(1 - 1/n) interior (the
  // sign swings the full -1 -> +1 range, which stationarity forces).
  ex.labels[0] = low - edge_dip;
  ex.labels[L - 1] = low - edge_dip;
  for (long j = 2; j <= L - 1; ++j) ex.labels[j - 1] = low - (1.0 - 2.0 / nd);
  for (long k = 1; k < m / 2; ++k) {
    const long a = 2 * k * L + 1, b = (2 * k + 1) * L;
    ex.labels[a - 1] = low - edge_dip;
    ex.labels[b - 1] = low - edge_dip;
    for (long j = a + 1; j <= b - 1; ++j) ex.labels[j - 1] = low - 2.0 * (1.0 - 1.0 / nd);
  }
  for (long k = 0; k < m / 2; ++k) {
    for (long j = (2 * k + 1) * L + 1; j <= (2 * k + 2) * L; ++j) ex.labels[j - 1] = G;
  }

  // Upper-boundary multipliers on the high plateaus.
  for (long k = 0; k + 1 < m / 2; ++k) {
    const long a = (2 * k + 1) * L + 1, b = (2 * k + 2) * L;
    ex.gamma_plus[a - 1] = G - B - edge_dip;
    ex.gamma_plus[b - 1] = G - B - edge_dip;
    for (long j = a + 1; j <= b - 1; ++j) ex.gamma_plus[j - 1] = G - B - 2.0 * (1.0 - 1.0 / nd);
  }
  // Last high plateau: the sign variable only swings back to 0, halving the
  // interior multiplier.
  ex.gamma_plus[n - L] = G - B - edge_dip;
  ex.gamma_plus[n - 1] = G - B - edge_dip;
  for (long j = n - L + 2; j <= n - 1; ++j) ex.gamma_plus[j - 1] = G - B - (1.0 - 2.0 / nd);

  // Sign variables (s_t for t = 1..n-1; s_0 = s_n = 0 implied).
  const double denom = Ld - 2.0;
  for (long t = 1; t <= L - 1; ++t) {
    ex.s[t - 1] = 1.0 / nd + (t - 1) * (1.0 - 2.0 / nd) / denom;
  }
  ex.s[L - 1] = 1.0;
  for (long k = 0; k + 1 < m / 2; ++k) {
    const long a = (2 * k + 1) * L + 1, b = (2 * k + 2) * L;
    for (long t = a; t <= b - 1; ++t) {
      ex.s[t - 1] = 1.0 - 1.0 / nd + (t - 1 - (2 * k + 1) * L) * (2.0 / nd - 2.0) / denom;
    }
    ex.s[b - 1] = -1.0;
  }
  for (long k = 1; k < m / 2; ++k) {
    const long a = 2 * k * L + 1, b = (2 * k + 1) * L;
    for (long t = a; t <= b - 1; ++t) {
      ex.s[t - 1] = -1.0 + 1.0 / nd + (t - 1 - 2 * k * L) * (2.0 - 2.0 / nd) / denom;
    }
    ex.s[b - 1] = 1.0;
  }
  for (long t = n - L + 1; t <= n - 1; ++t) {
    ex.s[t - 1] = 1.0 - 1.0 / nd + (t - 1 - n + L) * (2.0 / nd - 1.0) / denom;
  }
  return ex;
}

Scenario gen_scenario(const ScenarioSpec& spec) {
  if (spec.kind == ScenarioKind::Example1) {
    const Example1Data ex = gen_example1(spec.n);
    Scenario sc;
    sc.labels = ex.labels;
    sc.comparator = ex.u;
    sc.tv_budget = ex.C_n;
    const OracleProblem p = ex.problem();
    sc.losses = p.losses;
    return sc;
  }

  if (spec.n < 1) throw Error("gen_scenario: horizon must be positive");
  const double B = spec.curv.B > 0 ? spec.curv.B : 1.0;
  const double G = spec.curv.G > 0 ? spec.curv.G : std::max(1.0, B);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Scenario sc;
  sc.comparator.assign(spec.n, 0.0);

  switch (spec.kind) {
    case ScenarioKind::PiecewiseConstant: {
      const long segments = spec.m_switches + 1;
      std::vector<double> levels(segments);
      for (auto& v : levels) v = B * unit(rng);
      double tv = 0.0;
      for (long t = 0; t < spec.n; ++t) {
        const long seg = std::min<long>(segments - 1, t * segments / spec.n);
        sc.comparator[t] = levels[seg];
        if (t > 0) tv += std::abs(sc.comparator[t] - sc.comparator[t - 1]);
      }
      sc.tv_budget = tv;
      sc.labels.resize(spec.n);
      for (long t = 0; t < spec.n; ++t) {
        sc.labels[t] = std::clamp(sc.comparator[t] + spec.noise_eps * unit(rng), -G, G);
      }
      break;
    }
    case ScenarioKind::SinusoidDrift: {
      if (spec.amplitude > B) throw Error("gen_scenario: sinusoid amplitude exceeds the box");
      double tv = 0.0;
      for (long t = 0; t < spec.n; ++t) {
        sc.comparator[t] =
            spec.amplitude * std::sin(2.0 * M_PI * spec.freq * t / static_cast<double>(spec.n));
        if (t > 0) tv += std::abs(sc.comparator[t] - sc.comparator[t - 1]);
      }
      sc.tv_budget = tv;
      sc.labels = sc.comparator;
      for (double& y : sc.labels) y = std::clamp(y, -G, G);
      break;
    }
    case ScenarioKind::RandomWalkTV: {
      if (spec.n < 2) {
        sc.tv_budget = 0.0;
        sc.labels = {std::clamp(unit(rng), -G, G)};
        break;
      }
      const double h = spec.budget / static_cast<double>(spec.n - 1);
      if (h > 2.0 * B) throw Error("gen_scenario: TV budget infeasible for the box");
      // Reflecting +-h walk: the step magnitude is constant, so the TV equals
      // the budget exactly; direction flips when a step would exit the box.
      double w = 0.0;
      for (long t = 0; t < spec.n; ++t) {
        if (t > 0) {
          double step = (unit(rng) >= 0.0 ? h : -h);
          if (std::abs(w + step) > B) step = -step;
          w += step;
        }
        sc.comparator[t] = w;
      }
      sc.tv_budget = spec.budget;
      sc.labels.resize(spec.n);
      for (long t = 0; t < spec.n; ++t) {
        sc.labels[t] = std::clamp(sc.comparator[t] + unit(rng), -G, G);
      }
      break;
    }
    default:
      throw Error("gen_scenario: unknown scenario kind");
  }

  CurvatureInfo curv = spec.curv;
  curv.G = G;
  curv.B = B;
  curv.H = 2.0;
  sc.losses.reserve(spec.n);
  for (double y : sc.labels) sc.losses.push_back(squared_loss(y, curv));
  return sc;
}

}  // namespace tvdr
