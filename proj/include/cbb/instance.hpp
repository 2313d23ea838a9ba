#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cbb {

enum class RewardKind { Bernoulli, Deterministic };

struct InstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Context probabilities do not sum to one.
struct ProbabilityMassError : InstanceError {
  using InstanceError::InstanceError;
};
// A mean or probability lies outside [0, 1].
struct RangeError : InstanceError {
  using InstanceError::InstanceError;
};
// Some delay is < 1.
struct DelayError : InstanceError {
  using InstanceError::InstanceError;
};
struct UnknownNameError : InstanceError {
  using InstanceError::InstanceError;
};
struct ParamError : InstanceError {
  using InstanceError::InstanceError;
};

// Static problem data: k arms with blocking delays d_i, m contexts with
// arrival probabilities f_j, and a k x m matrix of mean rewards.
// Immutable after validation; safe to share across threads.
class Instance {
 public:
  static Instance validate(std::vector<int> delays,
                           std::vector<double> context_probs,
                           std::vector<double> means_row_major,
                           RewardKind kind = RewardKind::Bernoulli);

  int num_arms() const { return k_; }
  int num_contexts() const { return m_; }
  int delay(int i) const { return delays_[i]; }
  int max_delay() const { return max_delay_; }
  double context_prob(int j) const { return context_probs_[j]; }
  double mean(int i, int j) const { return means_[i * m_ + j]; }
  const std::vector<double>& means_row_major() const { return means_; }
  const std::vector<int>& delays() const { return delays_; }
  const std::vector<double>& context_probs() const { return context_probs_; }
  RewardKind reward_kind() const { return kind_; }

  nlohmann::json to_json() const;
  static Instance from_json(const nlohmann::json& j);

  // Empty placeholder; only validate()/from_json() produce usable instances.
  Instance() = default;

 private:
  int k_ = 0;
  int m_ = 0;
  int max_delay_ = 1;
  std::vector<int> delays_;
  std::vector<double> context_probs_;
  std::vector<double> means_;  // row-major, arms x contexts
  RewardKind kind_ = RewardKind::Bernoulli;
};

// Canonical instances used by the experiment suite.
//
// integral_instance(gap): 3 arms of delay 3, 3 equiprobable contexts,
//   mean 0.9 on the diagonal and 0.9-gap off it.
Instance integral_instance(double gap);

// 3 arms with delays {2,3,6}, equiprobable contexts, diag 0.9 / off 0.3.
Instance nonintegral_3x3();

// 3 arms of delay 6, random context probabilities, diag U[0.5,0.9],
// off-diagonal U[0,0.3]. Seeded for reproducibility.
Instance nonintegral_3x3_d6(std::uint64_t seed);

// 10 arms with delays in {8,9}, random context probabilities, diag 0.9,
// off-diagonal U[0,0.3].
Instance nonintegral_10x10(std::uint64_t seed);

// k arms, k contexts, d_i = k, f_j = 1/k, mean delta on the diagonal and
// zero elsewhere.
Instance gap_instance(int k, double delta);

// Two contexts (eps, 1-eps), one arm of the given delay carrying rewards
// big_reward/eps and 1 rescaled into [0,1], plus a zero-reward dummy arm.
// Rewards are deterministic.
Instance hardness_instance(int delay, double eps, double big_reward);

// Dispatch by name with a JSON parameter object; rejects unknown names
// and unknown parameter keys.
Instance named_instance(const std::string& name, const nlohmann::json& params);

}  // namespace cbb
