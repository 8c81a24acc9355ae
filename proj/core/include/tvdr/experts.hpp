// Base learners: projected online gradient descent (strongly convex rates)
// and online Newton step (exp-concave rates).
#pragma once

#include "tvdr/types.hpp"

namespace tvdr {

// Step-size schedules for OGD. The round counter is the expert-local age
// (each learner is a fresh run from its birth round).
enum class OgdStepRule { InverseHalfT, InverseHT };

struct OgdState {
  Vec x;                 // current iterate, always inside the set
  long t_local = 1;      // rounds since birth (>= 1)
  OgdStepRule rule = OgdStepRule::InverseHalfT;
  double H = 1.0;        // strong-convexity modulus used by InverseHT
};

OgdState ogd_init(const DecisionSet& set, OgdStepRule rule, double H = 1.0);
Vec ogd_predict(const OgdState& state);
// x <- project(x - eta_t * grad f(x)), eta_t = 1/(2 t_local) or 1/(H t_local).
void ogd_step(OgdState& state, const LossSpec& loss, const DecisionSet& set);

struct OnsState {
  Vec x;        // current iterate
  Mat A;        // eps*I + sum of gradient outer products
  double zeta;  // ONS parameter
  double eps;   // initial ridge
};

// zeta = min{ 1/(16 G B sqrt(d)), 1/(4 gamma^2) },
// gamma = 2 G B sqrt(alpha d / 2) + 1/sqrt(2 alpha).
double ons_zeta(const CurvatureInfo& curv, int d);
double ons_gamma(const CurvatureInfo& curv, int d);

// eps defaults to 1/(zeta^2 D^2) with D the set's L2 diameter.
OnsState ons_init(const DecisionSet& set, double zeta, double eps = -1.0);

// g = grad f(x); A <- A + g g^T; x <- Pi^A_set(x - (1/zeta) A^{-1} g),
// where Pi^A is the generalized (A-norm) projection.
void ons_step(OnsState& state, const LossSpec& loss, const DecisionSet& set);

// argmin_{z in set} (z - v)^T A (z - v), solved by projected gradient with a
// certified KKT residual (exact clip for d = 1 boxes).
Vec generalized_projection(const DecisionSet& set, const Mat& A, const Vec& v);

}  // namespace tvdr
