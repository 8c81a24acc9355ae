#include "tvdr/reductions.hpp"

#include <cmath>

namespace tvdr {

LossSpec sc_surrogate(const Vec& x_t, const Vec& grad, double H, int i) {
  if (H <= 0) throw Error("sc_surrogate: strong-convexity modulus must be positive");
  Vec center(1);
  center[0] = x_t[i] - grad[i] / H;
  CurvatureInfo curv;
  curv.H = 2.0;
  return quadratic_surrogate(center, curv);
}

bool sc_regret_bridge_check(const LossSpec& f, const Vec& x_t, const Vec& w, double H) {
  const Vec grad = eval_grad(f, x_t);
  const double lhs = eval_loss(f, x_t) - eval_loss(f, w);
  double surrogate_gap = 0.0;
  for (int i = 0; i < x_t.size(); ++i) {
    const LossSpec li = sc_surrogate(x_t, grad, H, i);
    Vec xi(1), wi(1);
    xi[0] = x_t[i];
    wi[0] = w[i];
    surrogate_gap += eval_loss(li, xi) - eval_loss(li, wi);
  }
  return lhs <= (H / 2.0) * surrogate_gap + 1e-9;
}

LossSpec ec_surrogate(const Vec& x_t, const Vec& grad, double alpha) {
  if (alpha <= 0) throw Error("ec_surrogate: exp-concavity modulus must be positive");
  const double a = std::sqrt(alpha / 2.0);
  const double b = 1.0 / std::sqrt(2.0 * alpha);
  GeneralSmooth gs;
  gs.value = [x_t, grad, a, b](const Vec& x) -> double {
    const double q = a * grad.dot(x - x_t) + b;
    return q * q;
  };
  gs.grad = [x_t, grad, a, b](const Vec& x) -> Vec {
    const double q = a * grad.dot(x - x_t) + b;
    return (2.0 * q * a) * grad;
  };
  LossSpec out;
  out.kind = std::move(gs);
  out.curv.alpha = alpha;
  return out;
}

LossSpec cutkosky_surrogate(const LossSpec& f, const DecisionSet& W, double G) {
  GeneralSmooth gs;
  gs.value = [f, W, G](const Vec& x) -> double {
    const Vec p = project(W, x, Norm::L1);
    return eval_loss(f, x) + G * (x - p).lpNorm<1>();
  };
  gs.grad = [f, W, G](const Vec& x) -> Vec {
    const Vec p = project(W, x, Norm::L1);
    Vec sign(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double d = x[i] - p[i];
      sign[i] = (d > 1e-12 ? 1.0 : (d < -1e-12 ? -1.0 : 0.0));
    }
    return eval_grad(f, x) + G * sign;
  };
  LossSpec out;
  out.kind = std::move(gs);
  out.curv = f.curv;
  out.curv.G_inf = 2.0 * G;  // true gradient bound G plus the penalty's G
  return out;
}

ScReduction sc_reduction_init(int d, double H, double B, double G_inf, Pruning pruning) {
  ScReduction red;
  red.H = H;
  red.B = B;
  red.G_inf = G_inf;
  red.d = d;
  CurvatureInfo curv;
  curv.H = H;
  curv.B = B;
  curv.G_inf = G_inf;
  const double zeta = flh_meta_rate(curv, GameKind::StronglyConvex);
  const DecisionSet interval = box_set(B, 1);
  for (int i = 0; i < d; ++i) {
    red.runners.push_back(flh_init(interval, zeta, pruning, [interval]() -> ExpertState {
      return ogd_init(interval, OgdStepRule::InverseHalfT);
    }));
  }
  return red;
}

Vec ScReduction::predict() {
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = flh_predict(runners[i])[0];
  return x;
}

void ScReduction::observe(const Vec& x_t, const Vec& grad) {
  for (int i = 0; i < d; ++i) {
    flh_update(runners[i], sc_surrogate(x_t, grad, H, i));
  }
}

BoxToConvex box_to_convex_init(const DecisionSet& W, double G,
                               std::function<Vec()> inner_predict,
                               std::function<void(const LossSpec&)> inner_observe) {
  BoxToConvex red;
  red.W = W;
  red.D = box_set(W.circumscribing_box_radius(), W.dim);
  red.G = G;
  red.inner_predict = std::move(inner_predict);
  red.inner_observe = std::move(inner_observe);
  return red;
}

BoxToConvexRound box_to_convex_round(BoxToConvex& red, const LossSpec& f) {
  BoxToConvexRound out;
  out.inner_point = red.inner_predict();
  out.played = project(red.W, out.inner_point, Norm::L1);
  out.surrogate = cutkosky_surrogate(f, red.W, red.G);
  const double fv = eval_loss(f, out.played);
  const double sv = eval_loss(out.surrogate, out.inner_point);
  if (fv > sv + 1e-8) {
    throw Error("box_to_convex_round: audit f(played) <= surrogate(x_t) failed; "
                "check the Lipschitz constant G",
                red.round);
  }
  red.inner_observe(out.surrogate);
  red.round += 1;
  return out;
}

Vec Reparametrization::to_x(const Vec& z) const {
  return Ainv * (Dinv_diag.cwiseProduct(z + Vec::Ones(z.size())) + c);
}

Vec Reparametrization::to_z(const Vec& x) const {
  return (A * x - c).cwiseQuotient(Dinv_diag) - Vec::Ones(x.size());
}

LossSpec Reparametrization::wrap(const LossSpec& f) const {
  GeneralSmooth gs;
  const Reparametrization self = *this;
  gs.value = [self, f](const Vec& z) -> double { return eval_loss(f, self.to_x(z)); };
  gs.grad = [self, f](const Vec& z) -> Vec {
    // chain rule: d x / d z = A^{-1} D^{-1}
    const Vec gx = eval_grad(f, self.to_x(z));
    return (self.Ainv * Mat(self.Dinv_diag.asDiagonal())).transpose() * gx;
  };
  LossSpec out;
  out.kind = std::move(gs);
  out.curv = f.curv;
  out.curv.G = f.curv.G * lipschitz_scale;
  out.curv.G_inf = f.curv.G_inf * lipschitz_scale;
  out.curv.B = 1.0;
  return out;
}

Reparametrization polytope_to_box(const Mat& A, const Vec& b, const Vec& c) {
  if (A.rows() != A.cols()) throw Error("polytope_to_box: A must be square");
  for (int i = 0; i < b.size(); ++i) {
    if (b[i] - c[i] <= 0) throw Error("polytope_to_box: b - c must be positive componentwise");
  }
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible() ||
      A.norm() * lu.inverse().norm() > 1e12) {
    throw Error("polytope_to_box: A is singular or ill-conditioned");
  }
  Reparametrization rep;
  rep.A = A;
  rep.b = b;
  rep.c = c;
  rep.Ainv = lu.inverse();
  rep.Dinv_diag = (b - c) / 2.0;
  const Mat M = rep.Ainv * Mat(rep.Dinv_diag.asDiagonal());
  Eigen::JacobiSVD<Mat> svd(M);
  rep.lipschitz_scale = svd.singularValues()[0];
  return rep;
}

}  // namespace tvdr
