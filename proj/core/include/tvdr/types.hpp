// Shared domain types: losses, decision sets, regret accounting.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tvdr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Structured error carrying an optional round index.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, long round = -1)
      : std::runtime_error(round >= 0 ? what + " (round " + std::to_string(round) + ")" : what),
        round_(round) {}
  long round() const { return round_; }

 private:
  long round_;
};

// Curvature / boundedness metadata attached to a loss.
//   H      strong-convexity modulus (0 if none)
//   alpha  exp-concavity modulus (0 if none)
//   G      L2 gradient bound
//   G_inf  Linf gradient bound
//   B      box radius of the decision set the loss is played on
struct CurvatureInfo {
  double H = 0.0;
  double alpha = 0.0;
  double G = 0.0;
  double G_inf = 0.0;
  double B = 0.0;
};

// Loss kinds.
struct SquaredScalar {
  double label = 0.0;  // (label - x)^2, d = 1
};
struct QuadraticSurrogate {
  Vec center;  // ||x - center||^2 (per-coordinate squares summed)
};
struct GeneralSmooth {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
};

struct LossSpec {
  std::variant<SquaredScalar, QuadraticSurrogate, GeneralSmooth> kind;
  CurvatureInfo curv;
};

double eval_loss(const LossSpec& loss, const Vec& x);
Vec eval_grad(const LossSpec& loss, const Vec& x);

// Convenience constructors.
LossSpec squared_loss(double label, const CurvatureInfo& curv);
LossSpec quadratic_surrogate(const Vec& center, const CurvatureInfo& curv);

// Decision sets.
enum class Norm { L1, L2 };

struct Box {
  double radius = 1.0;  // [-radius, radius]^d
};
struct L2Ball {
  double radius = 1.0;
};
struct L1Ball {
  double radius = 1.0;
};
struct Simplex {};
struct Polytope {
  Mat A;   // lo <= A x <= hi, A square full rank
  Vec lo;
  Vec hi;
};

struct DecisionSet {
  std::variant<Box, L2Ball, L1Ball, Simplex, Polytope> shape;
  int dim = 1;

  // Radius of the tightest box {x : ||x||_inf <= r} containing the set.
  double circumscribing_box_radius() const;
  // L2 diameter of the set.
  double l2_diameter() const;
};

DecisionSet box_set(double radius, int dim);
DecisionSet l2ball_set(double radius, int dim);
DecisionSet l1ball_set(double radius, int dim);

Vec project(const DecisionSet& set, const Vec& x, Norm norm = Norm::L2);
bool contains(const DecisionSet& set, const Vec& x, double tol = 1e-9);
// Distance from x to the set measured by membership residual (0 if inside).
double membership_residual(const DecisionSet& set, const Vec& x);

// Per-round regret accounting.
struct RoundRecord {
  long t = 0;
  double learner_loss = 0.0;
  double comparator_loss = 0.0;
  double cum_regret = 0.0;
  double comparator_tv = 0.0;  // TV consumed by the comparator through round t
};

struct RegretTrace {
  std::vector<RoundRecord> rounds;

  void add(long t, double learner_loss, double comparator_loss, double comparator_tv);
  double final_regret() const { return rounds.empty() ? 0.0 : rounds.back().cum_regret; }
  long n() const { return static_cast<long>(rounds.size()); }
};

}  // namespace tvdr
