#include "tvdr/experts.hpp"

#include <cmath>

namespace tvdr {

namespace {

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double lambda_max(const Mat& A) {
  const int d = static_cast<int>(A.rows());
  Vec v = Vec::Ones(d) / std::sqrt(static_cast<double>(d));
  double lam = 0.0;
  for (int k = 0; k < 30; ++k) {
    Vec w = A * v;
    lam = w.norm();
    if (lam < 1e-300) return 0.0;
    v = w / lam;
  }
  return lam;
}

Vec set_center(const DecisionSet& set) {
  if (std::holds_alternative<Simplex>(set.shape)) {
    return Vec::Constant(set.dim, 1.0 / set.dim);
  }
  if (std::holds_alternative<Polytope>(set.shape)) {
    const auto& P = std::get<Polytope>(set.shape);
    Eigen::FullPivLU<Mat> lu(P.A);
    return lu.solve(0.5 * (P.lo + P.hi));
  }
  return Vec::Zero(set.dim);
}

}  // namespace

OgdState ogd_init(const DecisionSet& set, OgdStepRule rule, double H) {
  OgdState s;
  s.x = set_center(set);
  s.t_local = 1;
  s.rule = rule;
  s.H = H;
  return s;
}

Vec ogd_predict(const OgdState& state) { return state.x; }

void ogd_step(OgdState& state, const LossSpec& loss, const DecisionSet& set) {
  const Vec g = eval_grad(loss, state.x);
  if (!g.allFinite()) throw Error("ogd_step: non-finite gradient", state.t_local);
  const double eta = state.rule == OgdStepRule::InverseHalfT
                         ? 1.0 / (2.0 * state.t_local)
                         : 1.0 / (state.H * state.t_local);
  state.x = project(set, state.x - eta * g, Norm::L2);
  state.t_local += 1;
}

double ons_gamma(const CurvatureInfo& curv, int d) {
  if (curv.alpha <= 0) throw Error("ons_gamma: exp-concavity modulus alpha must be positive");
  return 2.0 * curv.G * curv.B * std::sqrt(curv.alpha * d / 2.0) +
         1.0 / std::sqrt(2.0 * curv.alpha);
}

double ons_zeta(const CurvatureInfo& curv, int d) {
  if (curv.alpha <= 0) throw Error("ons_zeta: exp-concavity modulus alpha must be positive");
  const double gamma = ons_gamma(curv, d);
  return std::min(1.0 / (16.0 * curv.G * curv.B * std::sqrt(static_cast<double>(d))),
                  1.0 / (4.0 * gamma * gamma));
}

OnsState ons_init(const DecisionSet& set, double zeta, double eps) {
  OnsState s;
  s.x = set_center(set);
  s.zeta = zeta;
  if (eps <= 0) {
    const double D = set.l2_diameter();
    eps = 1.0 / (zeta * zeta * D * D);
  }
  s.eps = eps;
  s.A = eps * Mat::Identity(set.dim, set.dim);
  return s;
}

Vec generalized_projection(const DecisionSet& set, const Mat& A, const Vec& v) {
  // d = 1 box: the A-norm projection of a scalar is plain clipping.
  if (set.dim == 1 && std::holds_alternative<Box>(set.shape)) {
    return project(set, v, Norm::L2);
  }
  if (contains(set, v, 1e-12)) return v;
  const double L = std::max(lambda_max(A), 1e-12);
  Vec z = project(set, v, Norm::L2);
  const int max_iters = 2000;
  for (int k = 0; k < max_iters; ++k) {
    const Vec grad = A * (z - v);
    const Vec z_next = project(set, z - grad / L, Norm::L2);
    // KKT residual of the projection subproblem: fixed-point gap of the
    // projected-gradient map (scaled back to gradient units).
    if ((z - z_next).norm() * L <= 1e-8) return z_next;
    z = z_next;
  }
  return z;
}

void ons_step(OnsState& state, const LossSpec& loss, const DecisionSet& set) {
  const Vec g = eval_grad(loss, state.x);
  if (!g.allFinite()) throw Error("ons_step: non-finite gradient");
  state.A += g * g.transpose();
  Eigen::LDLT<Mat> ldlt(state.A);
  if (ldlt.info() != Eigen::Success) throw Error("ons_step: curvature matrix not factorizable");
  const Vec dir = ldlt.solve(g);
  if (!dir.allFinite()) throw Error("ons_step: curvature matrix numerically singular");
  const Vec v = state.x - dir / state.zeta;
  state.x = generalized_projection(set, state.A, v);
}

}  // namespace tvdr
