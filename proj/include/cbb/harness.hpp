#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbb/baselines.hpp"
#include "cbb/environment.hpp"
#include "cbb/instance.hpp"
#include "cbb/random.hpp"

namespace cbb {

enum class PolicyKind { FiCbb, UcbCbb, UcbGreedy };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

enum class AlphaMode { LpTimesT, ExactOracle };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  nlohmann::json instance_spec;
  Instance instance;
  std::string instance_tag;
  std::vector<PolicyKind> policies;
  long horizon = 0;
  int seeds = 0;
  std::uint64_t base_seed = 0;
  AlphaMode alpha_mode = AlphaMode::LpTimesT;
  std::string output_dir = "out";

  // Unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// One policy trajectory on one seed.
struct SingleRun {
  std::vector<RoundEvent> events;        // per round
  std::vector<double> rewards;           // per round
  std::vector<double> cum_reward;        // prefix sums
  double total_reward = 0.0;
  long plays = 0, lp_skips = 0, skips = 0, blocks = 0;
};

// Runs one policy over the horizon with nature streams keyed by the given
// stream and coin purposes split per policy.
SingleRun run_policy(const Instance& inst, PolicyKind kind, long horizon,
                     const RandomStream& stream, bool diagnostics = false,
                     std::vector<RoundOutcome>* outcomes = nullptr);

struct MetricSeries {
  std::vector<double> regret_mean, regret_q25, regret_q75;
  std::vector<double> lp_skip_rate, skip_rate, block_rate;  // seed means
  std::vector<double> final_reward_per_seed;
};

struct ExperimentResult {
  std::map<PolicyKind, MetricSeries> series;
  double lp_value = 0.0;  // LP optimum under the true means
  double alpha = 0.0;     // d_max / (2 d_max - 1)
  double wall_seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 0);

// CSV body for one policy: t, regret_mean, regret_q25, regret_q75,
// lp_skip_rate, skip_rate, block_rate.
std::string metric_csv(const MetricSeries& s);

// One CSV per policy plus a metadata JSON under cfg.output_dir.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace cbb
