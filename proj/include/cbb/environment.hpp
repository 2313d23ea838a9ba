#pragma once

#include <stdexcept>
#include <vector>

#include "cbb/instance.hpp"
#include "cbb/random.hpp"

namespace cbb {

inline constexpr int kNoArm = -1;

// A policy tried to play an arm whose blocking counter was nonzero.
struct BlockedPlayError : std::logic_error {
  using std::logic_error::logic_error;
};

// Rounds-until-available per arm; 0 means playable this round.
struct BlockState {
  std::vector<int> remaining;

  static BlockState fresh(const Instance& inst) {
    BlockState s;
    s.remaining.assign(inst.num_arms(), 0);
    return s;
  }
  bool available(int arm) const { return remaining[arm] == 0; }
};

enum class RoundEvent { Play, LpSkip, Skip, Block };

const char* to_string(RoundEvent e);

struct RoundOutcome {
  int context = -1;
  int action = kNoArm;  // kNoArm when the round was skipped/blocked
  double reward = 0.0;
  RoundEvent event = RoundEvent::LpSkip;
  int sampled_arm = kNoArm;  // arm drawn from the LP marginal, if any
};

// Context of round t, drawn by inverse CDF over the fixed context order.
int sample_context(const Instance& inst, const RandomStream& rng, long t);

// Reward draw for playing arm i under context j at round t: Bernoulli of
// the mean, or the mean itself for deterministic instances.
double sample_reward(const Instance& inst, int arm, int ctx,
                     const RandomStream& rng, long t);

// Advance the blocking counters by one round; `action` = kNoArm for a
// skipped round. Playing arm i leaves remaining[i] = d_i - 1 (the
// next-round view). Throws BlockedPlayError if the played arm was blocked.
BlockState apply_action(BlockState state, const Instance& inst, int action);

}  // namespace cbb
