#include "cbb/environment.hpp"

#include <string>

namespace cbb {

const char* to_string(RoundEvent e) {
  switch (e) {
    case RoundEvent::Play: return "play";
    case RoundEvent::LpSkip: return "lp_skip";
    case RoundEvent::Skip: return "skip";
    case RoundEvent::Block: return "block";
  }
  return "?";
}

int sample_context(const Instance& inst, const RandomStream& rng, long t) {
  const double u = rng.uniform(Purpose::Context, t);
  double acc = 0.0;
  int last_positive = 0;
  for (int j = 0; j < inst.num_contexts(); ++j) {
    const double f = inst.context_prob(j);
    if (f > 0.0) last_positive = j;
    acc += f;
    if (u < acc && f > 0.0) return j;
  }
  // u landed in the rounding tail; fall back to the last realizable context
  return last_positive;
}

double sample_reward(const Instance& inst, int arm, int ctx,
                     const RandomStream& rng, long t) {
  const double mu = inst.mean(arm, ctx);
  if (inst.reward_kind() == RewardKind::Deterministic) return mu;
  return rng.uniform(Purpose::Reward, t) < mu ? 1.0 : 0.0;
}

BlockState apply_action(BlockState state, const Instance& inst, int action) {
  if (action != kNoArm && state.remaining[action] != 0)
    throw BlockedPlayError("arm " + std::to_string(action) + " played while blocked");
  for (int& r : state.remaining)
    if (r > 0) --r;
  if (action != kNoArm) state.remaining[action] = inst.delay(action) - 1;
  return state;
}

}  // namespace cbb
