// Follow-the-leading-history meta-algorithm: a growing pool of base learners
// (one born per round) aggregated by exponential weights, with an optional
// dyadic-lifetime pruning mode that keeps the live pool logarithmic.
#pragma once

#include "tvdr/experts.hpp"
#include "tvdr/types.hpp"

#include <functional>

namespace tvdr {

enum class Pruning { None, LogPool };
enum class GameKind { Squared, StronglyConvex, ExpConcave };

using ExpertState = std::variant<OgdState, OnsState>;

struct Expert {
  long birth = 1;        // round the expert was created
  long lifetime = 0;     // rounds the expert stays alive under LogPool pruning
  double weight = 0.0;
  ExpertState state;
  Vec last_prediction;   // cached by flh_predict for the weight update
};

struct MetaState {
  std::vector<Expert> experts;
  double zeta_meta = 1.0;
  Pruning pruning = Pruning::None;
  long round = 1;  // the round about to be played
  DecisionSet set;
  std::function<ExpertState()> make_expert;
};

// Meta learning rate by game kind:
//   Squared        1/(2 (G+B)^2)
//   StronglyConvex 1/(2 (2B + G_inf/H)^2)
//   ExpConcave     1/(2 gamma^2), gamma from the ONS tuning
double flh_meta_rate(const CurvatureInfo& curv, GameKind game, int d = 1);

MetaState flh_init(const DecisionSet& set, double zeta_meta, Pruning pruning,
                   std::function<ExpertState()> make_expert);

Vec expert_predict(const Expert& e);

// Weighted average of live-expert predictions; caches each expert's round
// prediction for the subsequent update.
Vec flh_predict(MetaState& state);

// Multiplicative-weights reweighting on the observed loss (log-sum-exp
// normalized over the incumbents), expert steps, then the addition step:
// the new expert enters with weight 1/(t+1) and incumbents scale by
// 1 - 1/(t+1). LogPool pruning runs last.
void flh_update(MetaState& state, const LossSpec& loss);

// Drops experts whose dyadic lifetime (2^(ord2(birth)+2) rounds) has expired
// by round t and renormalizes the surviving weights.
void prune_pool(MetaState& state, long t);

// Lifetime assigned to an expert born at round r.
long dyadic_lifetime(long r);

}  // namespace tvdr
