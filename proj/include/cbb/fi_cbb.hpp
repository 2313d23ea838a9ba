#pragma once

#include <string>
#include <vector>

#include "cbb/environment.hpp"
#include "cbb/instance.hpp"
#include "cbb/lp.hpp"
#include "cbb/random.hpp"

namespace cbb {

// Per-arm availability probabilities q_{i,t} and non-skipping
// probabilities beta_{i,t} = min{1, (d_i/(2d_i-1))/q_{i,t}} for the
// full-information policy, built by the forward recursion
//   q_{i,1} = 1
//   q_{i,t+1} = q_{i,t}(1 - beta_{i,t} s_i)
//             + 1{t >= d_i} q_{i,t-d_i+1} beta_{i,t-d_i+1} s_i,
// where s_i = sum_j z*_{i,j}. Arms with d_i = 1 have q = beta = 1.
//
// The schedule grows lazily in blocks of 1024 rounds; the recursion is
// strictly forward so lazy extension is exact.
class AvailabilitySchedule {
 public:
  AvailabilitySchedule(const Instance& inst, const ExtremePoint& zstar);

  double q(int arm, long t);     // t is 1-based
  double beta(int arm, long t);  // t is 1-based

  double play_cap(int arm) const { return play_cap_[arm]; }  // d/(2d-1)
  double marginal(int arm) const { return zrow_[arm]; }      // sum_j z*_{i,j}

  // Debug dump, columns: t, arm, q, beta.
  void dump_csv(const std::string& path, long horizon);

 private:
  void extend(long t);

  std::vector<int> delays_;
  std::vector<double> zrow_;
  std::vector<double> play_cap_;
  // per arm, index t-1
  std::vector<std::vector<double>> q_;
  std::vector<std::vector<double>> beta_;
  long built_ = 0;
};

// Full-information policy: samples an arm from the optimal extreme point's
// per-context marginal, then plays a sampled available arm with
// probability beta_{i,t}.
class FiCbbPolicy {
 public:
  FiCbbPolicy(const Instance& inst, ExtremePoint zstar, RandomStream coins);

  // One round: draws the sampling coin, and a play coin only when the
  // sampled arm is available. Does not touch the block state.
  RoundOutcome decide(long t, int context, const BlockState& blocks);

  void observe(long /*t*/, int /*arm*/, int /*ctx*/, double /*reward*/) {}

  const ExtremePoint& zstar() const { return zstar_; }
  AvailabilitySchedule& schedule() { return schedule_; }

 private:
  const Instance& inst_;
  ExtremePoint zstar_;
  AvailabilitySchedule schedule_;
  RandomStream coins_;
};

}  // namespace cbb
