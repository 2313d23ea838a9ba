#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "cbb/environment.hpp"
#include "cbb/instance.hpp"
#include "cbb/lp.hpp"

namespace cbb {

// Greedy UCB baseline: plays the available arm with the highest index for
// the observed context. Never skips; a round with every arm blocked is a
// block event.
class UcbGreedyPolicy {
 public:
  explicit UcbGreedyPolicy(const Instance& inst);

  RoundOutcome decide(long t, int context, const BlockState& blocks);
  void observe(long t, int arm, int ctx, double reward);

  double emp_mean(int i, int j) const;
  long long pulls(int i, int j) const { return pulls_[i * m_ + j]; }

 private:
  const Instance& inst_;
  int m_;
  std::vector<long long> pulls_;
  std::vector<double> reward_sum_;
};

// Exact expected reward of the clairvoyant schedule: enumerate every
// context sequence, solve the blocking DP for each, and average.
struct OracleResult {
  double expected_reward = 0.0;
  bool has_sequences = false;
  // (sequence probability, best achievable reward), enumeration order
  std::vector<std::pair<double, double>> per_sequence;
};

OracleResult clairvoyant_reward(const Instance& inst, int horizon,
                                bool keep_sequences = false);

enum class UpperBoundKind { ExactOracle, LpTimesT };

// alpha * UB - policy_reward, UB being the exact oracle or T * Rew_LP.
double alpha_regret(const Instance& inst, double policy_reward, long horizon,
                    double alpha, UpperBoundKind kind);

// Grid search over the stationary single-arm play probabilities (q1, q2)
// of the two-context construction, against the block-policy lower bound on
// the clairvoyant rate.
struct HardnessReport {
  double f_opt = 0.0;
  double q1_opt = 0.0;
  double q2_opt = 0.0;
  double clairvoyant_lb = 0.0;
  double ratio_ub = 0.0;

  nlohmann::json to_json() const;
};

HardnessReport hardness_analysis(int delay, double eps, double big_reward);

// Objective of the stationary policy: average reward per round.
double hardness_rate(int delay, double eps, double big_reward, double q1,
                     double q2);

}  // namespace cbb
