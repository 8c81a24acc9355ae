#include <doctest.h>

#include "tvdr/experts.hpp"

#include <cmath>
#include <random>

using namespace tvdr;

namespace {
const double kTol = 1e-9;

Vec vec1(double v) {
  Vec x(1);
  x[0] = v;
  return x;
}

CurvatureInfo squared_curv() { return CurvatureInfo{2.0, 0.0, 4.0, 4.0, 2.0}; }
}  // namespace

TEST_CASE("ogd hand computation, inverse-half-t schedule") {
  auto set = box_set(2.0, 1);
  OgdState s = ogd_init(set, OgdStepRule::InverseHalfT);
  CHECK(ogd_predict(s)[0] == doctest::Approx(0.0));
  // f(x) = (1 - x)^2, grad at 0 is -2; eta_1 = 1/2, so x <- 0 + 1 = 1.
  ogd_step(s, squared_loss(1.0, squared_curv()), set);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(s.t_local == 2);
  // grad at 1 for label -1 is 4; eta_2 = 1/4, so x <- 1 - 1 = 0.
  ogd_step(s, squared_loss(-1.0, squared_curv()), set);
  CHECK(s.x[0] == doctest::Approx(0.0).epsilon(kTol));
}

TEST_CASE("ogd projects back into the box") {
  auto set = box_set(2.0, 1);
  OgdState s = ogd_init(set, OgdStepRule::InverseHalfT);
  // grad at 0 for label -4 is 8; x <- clip(0 - (1/2)*8) = clip(-4) = -2.
  ogd_step(s, squared_loss(-4.0, squared_curv()), set);
  CHECK(s.x[0] == doctest::Approx(-2.0).epsilon(kTol));
}

TEST_CASE("ogd inverse-ht schedule uses the strong convexity modulus") {
  auto set = box_set(2.0, 1);
  OgdState s = ogd_init(set, OgdStepRule::InverseHT, 2.0);
  // eta_1 = 1/(H*1) = 1/2; same first step as above.
  ogd_step(s, squared_loss(1.0, squared_curv()), set);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(kTol));
  OgdState s4 = ogd_init(set, OgdStepRule::InverseHT, 4.0);
  // eta_1 = 1/4; x <- 0 + (1/4)*2 = 0.5.
  ogd_step(s4, squared_loss(1.0, squared_curv()), set);
  CHECK(s4.x[0] == doctest::Approx(0.5).epsilon(kTol));
}

TEST_CASE("ogd static regret stays logarithmic on a strongly convex stream") {
  auto set = box_set(2.0, 1);
  OgdState s = ogd_init(set, OgdStepRule::InverseHalfT);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const long n = 4096;
  std::vector<double> labels(n);
  for (auto& v : labels) v = 0.7 + 0.1 * u(rng);
  double learner = 0.0, best = 0.0;
  double mean = 0.0;
  for (double v : labels) mean += v / n;
  for (long t = 0; t < n; ++t) {
    LossSpec f = squared_loss(labels[t], squared_curv());
    learner += eval_loss(f, ogd_predict(s));
    best += eval_loss(f, vec1(mean));
    ogd_step(s, f, set);
  }
  const double G = 6.0;  // |grad| <= 2(|y| + B) on this stream, generous bound
  CHECK(learner - best <= G * G / 2.0 * (1.0 + std::log(static_cast<double>(n))));
}

TEST_CASE("ons tuning constants") {
  // G = B = 1, alpha = 2, d = 1:
  // gamma = 2*1*1*sqrt(2*1/2) + 1/sqrt(4) = 2.5,
  // zeta = min{1/16, 1/(4*6.25)} = min{0.0625, 0.04} = 0.04.
  CurvatureInfo curv{0.0, 2.0, 1.0, 1.0, 1.0};
  CHECK(ons_gamma(curv, 1) == doctest::Approx(2.5).epsilon(kTol));
  CHECK(ons_zeta(curv, 1) == doctest::Approx(0.04).epsilon(kTol));
}

TEST_CASE("ons init seeds the ridge from the set diameter") {
  auto set = box_set(2.0, 1);  // D = 4
  OnsState s = ons_init(set, 0.5);
  CHECK(s.eps == doctest::Approx(1.0 / (0.25 * 16.0)).epsilon(kTol));
  CHECK(s.A(0, 0) == doctest::Approx(s.eps).epsilon(kTol));
  CHECK(s.x[0] == doctest::Approx(0.0));
}

TEST_CASE("ons scalar step hand computation") {
  auto set = box_set(2.0, 1);
  OnsState s = ons_init(set, 1.0, 1.0);  // A = [1]
  // grad at x=0 for f(x)=(x-1)^2 is -2. A <- 1 + 4 = 5.
  // x <- clip(0 - (1/zeta) * A^{-1} g) = clip(0 + 2/5) = 0.4.
  LossSpec f = squared_loss(1.0, squared_curv());
  ons_step(s, f, set);
  CHECK(s.A(0, 0) == doctest::Approx(5.0).epsilon(kTol));
  CHECK(s.x[0] == doctest::Approx(0.4).epsilon(kTol));
}

TEST_CASE("ons scalar step clips at the boundary") {
  auto set = box_set(1.0, 1);
  OnsState s = ons_init(set, 0.1, 1.0);
  // Unconstrained target 0 + 10 * 2/5 = 4, clipped to 1.
  ons_step(s, squared_loss(1.0, squared_curv()), set);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(kTol));
}

TEST_CASE("ons accumulates gradient outer products") {
  auto set = box_set(2.0, 2);
  OnsState s = ons_init(set, 1.0, 1.0);
  Vec c(2);
  c << 1.0, -1.0;
  CurvatureInfo curv{2.0, 0.0, 6.0, 6.0, 2.0};
  double prev_trace = s.A.trace();
  for (int k = 0; k < 5; ++k) {
    Vec g = eval_grad(quadratic_surrogate(c, curv), s.x);
    ons_step(s, quadratic_surrogate(c, curv), set);
    CHECK(s.A.trace() == doctest::Approx(prev_trace + g.squaredNorm()).epsilon(1e-9));
    prev_trace = s.A.trace();
  }
  CHECK(contains(set, s.x, 1e-7));
}

TEST_CASE("generalized projection reduces the A-norm distance") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto set = l2ball_set(1.0, 3);
  for (int k = 0; k < 20; ++k) {
    Mat R(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) R(i, j) = u(rng);
    Mat A = R.transpose() * R + 0.1 * Mat::Identity(3, 3);
    Vec v(3);
    v << u(rng), u(rng), u(rng);
    Vec p = generalized_projection(set, A, v);
    CHECK(contains(set, p, 1e-6));
    // Optimality: no feasible point does better in the A-norm (sampled check).
    const double pd = (p - v).dot(A * (p - v));
    for (int j = 0; j < 30; ++j) {
      Vec z(3);
      z << u(rng), u(rng), u(rng);
      z = project(set, z);
      CHECK((z - v).dot(A * (z - v)) >= pd - 1e-5);
    }
  }
}

TEST_CASE("generalized projection is exact clipping for scalar boxes") {
  auto set = box_set(1.5, 1);
  Mat A(1, 1);
  A << 7.0;
  CHECK(generalized_projection(set, A, vec1(9.0))[0] == doctest::Approx(1.5));
  CHECK(generalized_projection(set, A, vec1(-0.4))[0] == doctest::Approx(-0.4));
}
