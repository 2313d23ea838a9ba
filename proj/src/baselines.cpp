#include "cbb/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "cbb/ucb_cbb.hpp"

namespace cbb {

UcbGreedyPolicy::UcbGreedyPolicy(const Instance& inst)
    : inst_(inst), m_(inst.num_contexts()) {
  pulls_.assign(static_cast<std::size_t>(inst.num_arms()) * m_, 0);
  reward_sum_.assign(pulls_.size(), 0.0);
}

double UcbGreedyPolicy::emp_mean(int i, int j) const {
  const auto p = pulls_[i * m_ + j];
  return p == 0 ? 0.0 : reward_sum_[i * m_ + j] / p;
}

RoundOutcome UcbGreedyPolicy::decide(long t, int context, const BlockState& blocks) {
  RoundOutcome out;
  out.context = context;
  int best = kNoArm;
  double best_index = -1.0;
  for (int i = 0; i < inst_.num_arms(); ++i) {
    if (!blocks.available(i)) continue;
    const double idx =
        ucb_index(emp_mean(i, context), pulls_[i * m_ + context], static_cast<double>(t));
    if (idx > best_index) {  // ties go to the lowest arm index
      best_index = idx;
      best = i;
    }
  }
  if (best == kNoArm) {
    out.event = RoundEvent::Block;  // every arm blocked
    return out;
  }
  out.event = RoundEvent::Play;
  out.action = best;
  out.sampled_arm = best;
  return out;
}

void UcbGreedyPolicy::observe(long /*t*/, int arm, int ctx, double reward) {
  ++pulls_[arm * m_ + ctx];
  reward_sum_[arm * m_ + ctx] += reward;
}

namespace {

// Blocking states encoded in mixed radix over the per-arm counters.
struct StateSpace {
  int k;
  long size = 1;
  std::vector<long> stride;
  std::vector<int> radix;  // d_i

  explicit StateSpace(const Instance& inst) : k(inst.num_arms()) {
    stride.resize(k);
    radix.resize(k);
    for (int i = 0; i < k; ++i) {
      radix[i] = inst.delay(i);
      stride[i] = size;
      size *= inst.delay(i);
    }
  }
  int digit(long code, int i) const { return static_cast<int>(code / stride[i]) % radix[i]; }
};

}  // namespace

OracleResult clairvoyant_reward(const Instance& inst, int horizon,
                                bool keep_sequences) {
  const int k = inst.num_arms(), m = inst.num_contexts();
  StateSpace states(inst);
  double cost = static_cast<double>(states.size);
  for (int t = 0; t < horizon; ++t) {
    cost *= m;
    if (cost > 1e7)
      throw TooLargeError("clairvoyant DP guard exceeded: m^T * prod(d_i) > 1e7");
  }

  // Transition tables: counters tick down each round; playing arm i
  // requires digit 0 and resets it to d_i - 1.
  std::vector<long> tick(states.size);
  std::vector<std::vector<long>> play_to(k, std::vector<long>(states.size, -1));
  for (long s = 0; s < states.size; ++s) {
    long down = 0;
    for (int i = 0; i < k; ++i) {
      const int r = states.digit(s, i);
      down += static_cast<long>(std::max(0, r - 1)) * states.stride[i];
    }
    tick[s] = down;
    for (int i = 0; i < k; ++i)
      if (states.digit(s, i) == 0)
        play_to[i][s] = down + static_cast<long>(inst.delay(i) - 1) * states.stride[i];
  }

  OracleResult result;
  result.has_sequences = keep_sequences;

  std::vector<int> seq(horizon, 0);
  std::vector<double> value(states.size), next(states.size);
  double expected = 0.0;
  while (true) {
    double prob = 1.0;
    for (int t = 0; t < horizon; ++t) prob *= inst.context_prob(seq[t]);
    if (prob > 0.0) {
      std::fill(value.begin(), value.end(), 0.0);
      for (int t = horizon - 1; t >= 0; --t) {
        const int ctx = seq[t];
        for (long s = 0; s < states.size; ++s) {
          double best = value[tick[s]];  // skipping is always feasible
          for (int i = 0; i < k; ++i) {
            const long to = play_to[i][s];
            if (to >= 0) best = std::max(best, inst.mean(i, ctx) + value[to]);
          }
          next[s] = best;
        }
        std::swap(value, next);
      }
      expected += prob * value[0];
      if (keep_sequences) result.per_sequence.emplace_back(prob, value[0]);
    } else if (keep_sequences) {
      result.per_sequence.emplace_back(0.0, 0.0);
    }

    int pos = horizon - 1;
    while (pos >= 0 && seq[pos] == m - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  result.expected_reward = expected;
  return result;
}

double alpha_regret(const Instance& inst, double policy_reward, long horizon,
                    double alpha, UpperBoundKind kind) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParamError("alpha must be in (0, 1]");
  double ub = 0.0;
  if (kind == UpperBoundKind::ExactOracle) {
    ub = clairvoyant_reward(inst, static_cast<int>(horizon)).expected_reward;
  } else {
    ub = static_cast<double>(horizon) *
         solve_lp(inst, LpObjective::from_means(inst)).value;
  }
  return alpha * ub - policy_reward;
}

double hardness_rate(int delay, double eps, double big_reward, double q1, double q2) {
  return (big_reward * q1 + (1.0 - eps) * q2) /
         (1.0 + (delay - 1) * (eps * q1 + (1.0 - eps) * q2));
}

nlohmann::json HardnessReport::to_json() const {
  return nlohmann::json{{"f_opt", f_opt},
                        {"q_opt", {q1_opt, q2_opt}},
                        {"clairvoyant_lb", clairvoyant_lb},
                        {"ratio_ub", ratio_ub}};
}

HardnessReport hardness_analysis(int delay, double eps, double big_reward) {
  if (delay < 2) throw ParamError("hardness analysis needs d >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw ParamError("hardness eps must be in (0, 1)");
  if (!(big_reward > 0.0)) throw ParamError("hardness R must be positive");

  HardnessReport report;
  const int grid = 1000;  // 1001 points per axis
  for (int a = 0; a <= grid; ++a)
    for (int b = 0; b <= grid; ++b) {
      const double q1 = static_cast<double>(a) / grid;
      const double q2 = static_cast<double>(b) / grid;
      const double v = hardness_rate(delay, eps, big_reward, q1, q2);
      if (v > report.f_opt) {
        report.f_opt = v;
        report.q1_opt = q1;
        report.q2_opt = q2;
      }
    }

  const double block = delay * std::ceil(1.0 / std::sqrt(eps));
  report.clairvoyant_lb =
      big_reward * (1.0 - delay / block) * std::pow(1.0 - eps, block - 1) +
      (1.0 / delay - 1.0 / block) * std::pow(1.0 - eps, block);
  report.ratio_ub = report.f_opt / report.clairvoyant_lb;
  return report;
}

}  // namespace cbb
