#include "tvdr/types.hpp"

#include <algorithm>
#include <cmath>

namespace tvdr {

namespace {

const double kMembershipTol = 1e-9;

void check_dim(const Vec& x, int dim, const char* where) {
  if (x.size() != dim) {
    throw Error(std::string(where) + ": dimension mismatch, got " +
                std::to_string(x.size()) + ", expected " + std::to_string(dim));
  }
}

// L2 projection onto the probability simplex (sorting algorithm).
Vec project_simplex(const Vec& x) {
  const int d = static_cast<int>(x.size());
  std::vector<double> u(x.data(), x.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < d; ++i) {
    css += u[i];
    const double cand = (css - 1.0) / (i + 1);
    if (u[i] - cand > 0) {
      rho = i + 1;
      theta = cand;
    }
  }
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = std::max(0.0, x[i] - theta);
  return out;
}

// L2 projection onto the L1 ball of given radius via the simplex projection
// applied to |x| when outside.
Vec project_l1ball(const Vec& x, double r) {
  if (x.lpNorm<1>() <= r) return x;
  Vec a = x.cwiseAbs() / r;
  Vec p = project_simplex(a) * r;
  Vec out(x.size());
  for (int i = 0; i < x.size(); ++i) out[i] = (x[i] >= 0 ? p[i] : -p[i]);
  return out;
}

// L2 projection onto {lo <= Ax <= hi} by Dykstra's algorithm over the slab
// constraints (each row is a pair of halfspaces).
Vec project_polytope_l2(const Polytope& P, const Vec& x) {
  const int m = static_cast<int>(P.A.rows());
  const int sweeps = 400;
  Vec z = x;
  Mat corr = Mat::Zero(m, x.size());
  std::vector<double> row_sq(m);
  for (int i = 0; i < m; ++i) row_sq[i] = P.A.row(i).squaredNorm();
  for (int s = 0; s < sweeps; ++s) {
    double moved = 0.0;
    for (int i = 0; i < m; ++i) {
      Vec w = z + corr.row(i).transpose();
      const double v = P.A.row(i).dot(w);
      Vec proj = w;
      if (v > P.hi[i]) {
        proj = w - ((v - P.hi[i]) / row_sq[i]) * P.A.row(i).transpose();
      } else if (v < P.lo[i]) {
        proj = w - ((v - P.lo[i]) / row_sq[i]) * P.A.row(i).transpose();
      }
      corr.row(i) = (w - proj).transpose();
      moved += (z - proj).norm();
      z = proj;
    }
    if (moved < 1e-14) break;
  }
  return z;
}

// Approximate L1-norm projection via projected subgradient on
// h(y) = ||y - x||_1 over the set, with L2-feasibility polish each iterate.
// Exact for Box (clip); bounded-iteration scheme elsewhere.
Vec project_l1norm_iterative(const DecisionSet& set, const Vec& x) {
  const int iters = 500;
  Vec y = project(set, x, Norm::L2);
  Vec best = y;
  double best_val = (y - x).lpNorm<1>();
  const double scale = std::max(1.0, set.l2_diameter());
  for (int k = 1; k <= iters; ++k) {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double d = y[i] - x[i];
      g[i] = (d > 1e-15 ? 1.0 : (d < -1e-15 ? -1.0 : 0.0));
    }
    y = project(set, y - (0.05 * scale / std::sqrt(static_cast<double>(k))) * g, Norm::L2);
    const double val = (y - x).lpNorm<1>();
    if (val < best_val) {
      best_val = val;
      best = y;
    }
  }
  return best;
}

}  // namespace

double eval_loss(const LossSpec& loss, const Vec& x) {
  if (!x.allFinite()) throw Error("eval_loss: non-finite point");
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SquaredScalar>) {
          check_dim(x, 1, "eval_loss(SquaredScalar)");
          const double d = k.label - x[0];
          return d * d;
        } else if constexpr (std::is_same_v<T, QuadraticSurrogate>) {
          check_dim(x, static_cast<int>(k.center.size()), "eval_loss(QuadraticSurrogate)");
          return (x - k.center).squaredNorm();
        } else {
          return k.value(x);
        }
      },
      loss.kind);
}

Vec eval_grad(const LossSpec& loss, const Vec& x) {
  if (!x.allFinite()) throw Error("eval_grad: non-finite point");
  return std::visit(
      [&](const auto& k) -> Vec {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SquaredScalar>) {
          check_dim(x, 1, "eval_grad(SquaredScalar)");
          Vec g(1);
          g[0] = 2.0 * (x[0] - k.label);
          return g;
        } else if constexpr (std::is_same_v<T, QuadraticSurrogate>) {
          check_dim(x, static_cast<int>(k.center.size()), "eval_grad(QuadraticSurrogate)");
          return 2.0 * (x - k.center);
        } else {
          return k.grad(x);
        }
      },
      loss.kind);
}

LossSpec squared_loss(double label, const CurvatureInfo& curv) {
  if (curv.G > 0 && std::abs(label) > curv.G + 1e-12) {
    throw Error("squared_loss: |label| exceeds the gradient bound G");
  }
  return LossSpec{SquaredScalar{label}, curv};
}

LossSpec quadratic_surrogate(const Vec& center, const CurvatureInfo& curv) {
  return LossSpec{QuadraticSurrogate{center}, curv};
}

double DecisionSet::circumscribing_box_radius() const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return s.radius;
        else if constexpr (std::is_same_v<T, L2Ball>) return s.radius;
        else if constexpr (std::is_same_v<T, L1Ball>) return s.radius;
        else if constexpr (std::is_same_v<T, Simplex>) return 1.0;
        else throw Error("circumscribing_box_radius: unsupported for Polytope");
      },
      shape);
}

double DecisionSet::l2_diameter() const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return 2.0 * s.radius * std::sqrt(static_cast<double>(dim));
        else if constexpr (std::is_same_v<T, L2Ball>) return 2.0 * s.radius;
        else if constexpr (std::is_same_v<T, L1Ball>) return 2.0 * s.radius;
        else if constexpr (std::is_same_v<T, Simplex>) return std::sqrt(2.0);
        else {
          // Conservative bound via the box image of the slab constraints.
          const Polytope& P = s;
          Eigen::FullPivLU<Mat> lu(P.A);
          return 2.0 * (lu.inverse() * (P.hi - P.lo)).norm();
        }
      },
      shape);
}

DecisionSet box_set(double radius, int dim) { return DecisionSet{Box{radius}, dim}; }
DecisionSet l2ball_set(double radius, int dim) { return DecisionSet{L2Ball{radius}, dim}; }
DecisionSet l1ball_set(double radius, int dim) { return DecisionSet{L1Ball{radius}, dim}; }

Vec project(const DecisionSet& set, const Vec& x, Norm norm) {
  if (!x.allFinite()) throw Error("project: non-finite point");
  check_dim(x, set.dim, "project");
  return std::visit(
      [&](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          // For a box the L1 and L2 projections coincide (componentwise clip).
          return x.cwiseMax(-s.radius).cwiseMin(s.radius);
        } else if constexpr (std::is_same_v<T, L2Ball>) {
          if (norm == Norm::L1) return project_l1norm_iterative(set, x);
          const double nx = x.norm();
          return nx <= s.radius ? x : Vec((s.radius / nx) * x);
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          if (norm == Norm::L1) return project_l1norm_iterative(set, x);
          return project_l1ball(x, s.radius);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          if (norm == Norm::L1) throw Error("project: unsupported projection (Simplex, L1)");
          return project_simplex(x);
        } else {
          if (norm == Norm::L1) return project_l1norm_iterative(set, x);
          return project_polytope_l2(s, x);
        }
      },
      set.shape);
}

double membership_residual(const DecisionSet& set, const Vec& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return std::max(0.0, x.cwiseAbs().maxCoeff() - s.radius);
        } else if constexpr (std::is_same_v<T, L2Ball>) {
          return std::max(0.0, x.norm() - s.radius);
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          return std::max(0.0, x.lpNorm<1>() - s.radius);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          double r = std::abs(x.sum() - 1.0);
          for (int i = 0; i < x.size(); ++i) r = std::max(r, std::max(0.0, -x[i]));
          return r;
        } else {
          const Vec v = s.A * x;
          double r = 0.0;
          for (int i = 0; i < v.size(); ++i) {
            r = std::max(r, std::max(0.0, v[i] - s.hi[i]));
            r = std::max(r, std::max(0.0, s.lo[i] - v[i]));
          }
          return r;
        }
      },
      set.shape);
}

bool contains(const DecisionSet& set, const Vec& x, double tol) {
  (void)kMembershipTol;
  return membership_residual(set, x) <= tol;
}

void RegretTrace::add(long t, double learner_loss, double comparator_loss, double comparator_tv) {
  const double prev = rounds.empty() ? 0.0 : rounds.back().cum_regret;
  rounds.push_back(RoundRecord{t, learner_loss, comparator_loss,
                               prev + learner_loss - comparator_loss, comparator_tv});
}

}  // namespace tvdr
