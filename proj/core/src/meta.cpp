#include "tvdr/meta.hpp"

#include <cmath>

namespace tvdr {

namespace {
const double kWeightFloor = 1e-300;
}

double flh_meta_rate(const CurvatureInfo& curv, GameKind game, int d) {
  switch (game) {
    case GameKind::Squared: {
      if (curv.G <= 0 || curv.B <= 0) throw Error("flh_meta_rate: G and B required");
      const double s = curv.G + curv.B;
      return 1.0 / (2.0 * s * s);
    }
    case GameKind::StronglyConvex: {
      if (curv.H <= 0 || curv.B <= 0 || curv.G_inf <= 0) {
        throw Error("flh_meta_rate: H, B, G_inf required");
      }
      const double s = 2.0 * curv.B + curv.G_inf / curv.H;
      return 1.0 / (2.0 * s * s);
    }
    case GameKind::ExpConcave: {
      const double gamma = ons_gamma(curv, d);
      return 1.0 / (2.0 * gamma * gamma);
    }
  }
  throw Error("flh_meta_rate: unknown game kind");
}

long dyadic_lifetime(long r) {
  long ord = 0;
  while (r % 2 == 0 && r > 0) {
    r /= 2;
    ++ord;
  }
  return 4L << ord;  // 2^(ord2(r) + 2)
}

MetaState flh_init(const DecisionSet& set, double zeta_meta, Pruning pruning,
                   std::function<ExpertState()> make_expert) {
  MetaState st;
  st.set = set;
  st.zeta_meta = zeta_meta;
  st.pruning = pruning;
  st.make_expert = std::move(make_expert);
  Expert first;
  first.birth = 1;
  first.lifetime = dyadic_lifetime(1);
  first.weight = 1.0;
  first.state = st.make_expert();
  st.experts.push_back(std::move(first));
  return st;
}

Vec expert_predict(const Expert& e) {
  if (std::holds_alternative<OgdState>(e.state)) {
    return ogd_predict(std::get<OgdState>(e.state));
  }
  return std::get<OnsState>(e.state).x;
}

Vec flh_predict(MetaState& state) {
  if (state.experts.empty()) throw Error("flh_predict: empty expert pool");
  Vec out = Vec::Zero(state.set.dim);
  for (auto& e : state.experts) {
    e.last_prediction = expert_predict(e);
    out += e.weight * e.last_prediction;
  }
  return out;
}

void flh_update(MetaState& state, const LossSpec& loss) {
  if (state.experts.empty()) throw Error("flh_update: empty expert pool");

  // Reweight incumbents on their round-t losses (log-sum-exp normalized).
  std::vector<double> logw(state.experts.size());
  double max_lw = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < state.experts.size(); ++i) {
    const double f = eval_loss(loss, state.experts[i].last_prediction);
    if (std::isnan(f)) throw Error("flh_update: NaN loss", state.round);
    logw[i] = std::log(std::max(state.experts[i].weight, kWeightFloor)) - state.zeta_meta * f;
    max_lw = std::max(max_lw, logw[i]);
  }
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - max_lw);
  for (size_t i = 0; i < state.experts.size(); ++i) {
    state.experts[i].weight = std::max(std::exp(logw[i] - max_lw) / z, kWeightFloor);
  }
  // Re-normalize after flooring.
  double total = 0.0;
  for (const auto& e : state.experts) total += e.weight;
  for (auto& e : state.experts) e.weight /= total;

  // Step every live expert on the observed loss.
  for (auto& e : state.experts) {
    if (std::holds_alternative<OgdState>(e.state)) {
      ogd_step(std::get<OgdState>(e.state), loss, state.set);
    } else {
      ons_step(std::get<OnsState>(e.state), loss, state.set);
    }
  }

  // Addition step: new expert for round t+1 with weight 1/(t+1).
  const long t = state.round;
  const double nw = 1.0 / static_cast<double>(t + 1);
  for (auto& e : state.experts) e.weight *= (1.0 - nw);
  Expert fresh;
  fresh.birth = t + 1;
  fresh.lifetime = dyadic_lifetime(t + 1);
  fresh.weight = nw;
  fresh.state = state.make_expert();
  state.experts.push_back(std::move(fresh));

  state.round = t + 1;
  if (state.pruning == Pruning::LogPool) prune_pool(state, state.round);
}

void prune_pool(MetaState& state, long t) {
  if (state.pruning != Pruning::LogPool) return;
  std::vector<Expert> kept;
  kept.reserve(state.experts.size());
  for (auto& e : state.experts) {
    if (e.birth + e.lifetime > t) kept.push_back(std::move(e));
  }
  if (kept.empty()) throw Error("prune_pool: pruning emptied the pool", t);
  double total = 0.0;
  for (const auto& e : kept) total += e.weight;
  for (auto& e : kept) e.weight /= total;
  state.experts = std::move(kept);
}

}  // namespace tvdr
