// Surrogate-loss reductions:
//   (i)  strongly convex loss -> d univariate squared games (per-coordinate
//        quadratic surrogates around the gradient step);
//   (ii) exp-concave loss -> rank-one quadratic surrogate;
//   (iii) general convex set -> box via an L1-distance-penalized surrogate;
//   plus the affine reparametrization of a full-rank polytope onto a box.
#pragma once

#include "tvdr/meta.hpp"
#include "tvdr/types.hpp"

namespace tvdr {

// Per-coordinate surrogate (x - (x_t[i] - grad[i]/H))^2.
LossSpec sc_surrogate(const Vec& x_t, const Vec& grad, double H, int i);

// Audit of f(x_t) - f(w) <= (H/2) * sum_i [ l_i(x_t[i]) - l_i(w[i]) ]
// with l_i the per-coordinate surrogates built at x_t.
bool sc_regret_bridge_check(const LossSpec& f, const Vec& x_t, const Vec& w, double H);

// Rank-one quadratic surrogate
//   f(x) = ( sqrt(alpha/2) grad^T (x - x_t) + 1/sqrt(2 alpha) )^2
// with analytic gradient; value 1/(2 alpha) and gradient `grad` at x = x_t.
LossSpec ec_surrogate(const Vec& x_t, const Vec& grad, double alpha);

// Surrogate f(x) + G * S(x) with S(x) = ||x - Pi_W(x)||_1; the subgradient of
// S is the sign vector of x - Pi_W(x).
LossSpec cutkosky_surrogate(const LossSpec& f, const DecisionSet& W, double G);

// Strongly-convex reduction driver: d independent univariate FLH-OGD runners,
// assembled into a vector prediction; surrogates are built after the true
// gradient at the assembled point is revealed.
struct ScReduction {
  double H = 1.0;
  double B = 1.0;
  double G_inf = 1.0;
  int d = 1;
  std::vector<MetaState> runners;

  Vec predict();
  // Feeds per-coordinate surrogates built from grad f at x_t to the runners.
  void observe(const Vec& x_t, const Vec& grad);
};

ScReduction sc_reduction_init(int d, double H, double B, double G_inf, Pruning pruning);

// Box-to-convex-set reduction: an inner algorithm runs on the tightest
// circumscribing box D; we play the L1 projection onto W and feed the inner
// algorithm the distance-penalized surrogate.
struct BoxToConvex {
  DecisionSet W;
  DecisionSet D;      // tightest circumscribing box
  double G = 1.0;     // Linf gradient bound of the true losses on D
  long round = 1;
  std::function<Vec()> inner_predict;
  std::function<void(const LossSpec&)> inner_observe;
};

BoxToConvex box_to_convex_init(const DecisionSet& W, double G,
                               std::function<Vec()> inner_predict,
                               std::function<void(const LossSpec&)> inner_observe);

struct BoxToConvexRound {
  Vec played;          // point in W actually played
  Vec inner_point;     // the inner algorithm's iterate in D
  LossSpec surrogate;  // loss forwarded to the inner algorithm
};

// One protocol round: project, audit f(played) <= surrogate(x_t) + 1e-8,
// forward the surrogate. Audit failure raises an error with the round index.
BoxToConvexRound box_to_convex_round(BoxToConvex& red, const LossSpec& f);

// Affine reparametrization mapping the box {||z||_inf <= 1} onto
// {x : c <= A x <= b}: x = A^{-1} (D^{-1} (z + 1) + c), D = diag(2/(b-c)).
struct Reparametrization {
  Mat A;
  Vec b, c;
  Mat Ainv;
  Vec Dinv_diag;          // (b - c)/2
  double lipschitz_scale; // ||A^{-1} D^{-1}||_op; gradient bounds rescale by it

  Vec to_x(const Vec& z) const;  // box -> polytope
  Vec to_z(const Vec& x) const;  // polytope -> box
  // Wraps a loss on the polytope into the equivalent loss on the box.
  LossSpec wrap(const LossSpec& f) const;
};

Reparametrization polytope_to_box(const Mat& A, const Vec& b, const Vec& c);

}  // namespace tvdr
