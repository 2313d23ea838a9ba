#include "cbb/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbb/random.hpp"

namespace cbb {

namespace {

constexpr double kMassTol = 1e-12;

// m-1 sorted uniforms -> spacings; uniform over the simplex.
std::vector<double> random_simplex(int m, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> cuts(m - 1);
  for (int i = 0; i < m - 1; ++i) cuts[i] = rng.uniform(Purpose::Generic, 0, i);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> probs(m);
  double prev = 0.0;
  for (int i = 0; i < m - 1; ++i) {
    probs[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  probs[m - 1] = 1.0 - prev;
  // exact unit mass despite rounding
  double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return probs;
}

double uniform_in(RandomStream& rng, long key, std::uint64_t n, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform(Purpose::Generic, key, n);
}

}  // namespace

Instance Instance::validate(std::vector<int> delays,
                            std::vector<double> context_probs,
                            std::vector<double> means_row_major,
                            RewardKind kind) {
  const int k = static_cast<int>(delays.size());
  const int m = static_cast<int>(context_probs.size());
  if (k < 1 || m < 1) throw InstanceError("instance needs at least one arm and one context");
  if (means_row_major.size() != static_cast<std::size_t>(k) * m)
    throw InstanceError("means matrix size does not match k x m");

  for (int i = 0; i < k; ++i)
    if (delays[i] < 1) throw DelayError("delay of arm " + std::to_string(i) + " is < 1");

  double mass = 0.0;
  for (int j = 0; j < m; ++j) {
    if (!(context_probs[j] >= 0.0 && context_probs[j] <= 1.0))
      throw RangeError("context probability " + std::to_string(j) + " outside [0,1]");
    mass += context_probs[j];
  }
  if (std::abs(mass - 1.0) > kMassTol)
    throw ProbabilityMassError("context probabilities sum to " + std::to_string(mass));

  for (double mu : means_row_major)
    if (!(mu >= 0.0 && mu <= 1.0)) throw RangeError("mean reward outside [0,1]");

  Instance inst;
  inst.k_ = k;
  inst.m_ = m;
  inst.delays_ = std::move(delays);
  inst.context_probs_ = std::move(context_probs);
  inst.means_ = std::move(means_row_major);
  inst.kind_ = kind;
  inst.max_delay_ = *std::max_element(inst.delays_.begin(), inst.delays_.end());
  return inst;
}

nlohmann::json Instance::to_json() const {
  nlohmann::json means = nlohmann::json::array();
  for (int i = 0; i < k_; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m_; ++j) row.push_back(mean(i, j));
    means.push_back(row);
  }
  return nlohmann::json{
      {"k", k_},
      {"m", m_},
      {"delays", delays_},
      {"context_probs", context_probs_},
      {"means", means},
      {"reward_kind", kind_ == RewardKind::Bernoulli ? "bernoulli" : "deterministic"},
  };
}

Instance Instance::from_json(const nlohmann::json& j) {
  const int k = j.at("k").get<int>();
  const int m = j.at("m").get<int>();
  auto delays = j.at("delays").get<std::vector<int>>();
  auto probs = j.at("context_probs").get<std::vector<double>>();
  std::vector<double> means;
  const auto& mj = j.at("means");
  if (mj.is_array() && !mj.empty() && mj[0].is_array()) {
    for (const auto& row : mj)
      for (const auto& v : row) means.push_back(v.get<double>());
  } else {
    means = mj.get<std::vector<double>>();
  }
  RewardKind kind = RewardKind::Bernoulli;
  if (j.contains("reward_kind")) {
    const std::string s = j.at("reward_kind").get<std::string>();
    if (s == "bernoulli") kind = RewardKind::Bernoulli;
    else if (s == "deterministic") kind = RewardKind::Deterministic;
    else throw InstanceError("unknown reward_kind: " + s);
  }
  if (static_cast<int>(delays.size()) != k || static_cast<int>(probs.size()) != m)
    throw InstanceError("k/m fields disagree with array sizes");
  return validate(std::move(delays), std::move(probs), std::move(means), kind);
}

Instance integral_instance(double gap) {
  if (!(gap > 0.0 && gap <= 0.9)) throw ParamError("integral gap must be in (0, 0.9]");
  std::vector<double> means(9, 0.9 - gap);
  for (int i = 0; i < 3; ++i) means[i * 3 + i] = 0.9;
  return Instance::validate({3, 3, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, std::move(means));
}

Instance nonintegral_3x3() {
  std::vector<double> means(9, 0.3);
  for (int i = 0; i < 3; ++i) means[i * 3 + i] = 0.9;
  return Instance::validate({2, 3, 6}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, std::move(means));
}

Instance nonintegral_3x3_d6(std::uint64_t seed) {
  RandomStream rng(RandomStream::derive(seed, 0x3336));
  std::vector<double> means(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      means[i * 3 + j] = (i == j) ? uniform_in(rng, 1, i * 3 + j, 0.5, 0.9)
                                  : uniform_in(rng, 1, i * 3 + j, 0.0, 0.3);
  return Instance::validate({6, 6, 6}, random_simplex(3, RandomStream::derive(seed, 0x3337)),
                            std::move(means));
}

Instance nonintegral_10x10(std::uint64_t seed) {
  RandomStream rng(RandomStream::derive(seed, 0x1010));
  std::vector<int> delays(10);
  for (int i = 0; i < 10; ++i)
    delays[i] = rng.uniform(Purpose::Generic, 2, i) < 0.5 ? 8 : 9;
  std::vector<double> means(100);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      means[i * 10 + j] = (i == j) ? 0.9 : uniform_in(rng, 3, i * 10 + j, 0.0, 0.3);
  return Instance::validate(std::move(delays),
                            random_simplex(10, RandomStream::derive(seed, 0x1011)),
                            std::move(means));
}

Instance gap_instance(int k, double delta) {
  if (k < 1) throw ParamError("gap_instance needs k >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw ParamError("gap_instance delta must be in (0, 1]");
  std::vector<int> delays(k, k);
  std::vector<double> probs(k, 1.0 / k);
  std::vector<double> means(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) means[i * k + i] = delta;
  return Instance::validate(std::move(delays), std::move(probs), std::move(means));
}

Instance hardness_instance(int delay, double eps, double big_reward) {
  if (delay < 2) throw ParamError("hardness instance needs delay >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw ParamError("hardness eps must be in (0, 1)");
  if (!(big_reward > 0.0)) throw ParamError("hardness reward parameter must be positive");
  // rewards R/eps and 1 scaled by 1/(1 + R/eps) to fit [0,1]
  const double scale = 1.0 / (1.0 + big_reward / eps);
  std::vector<double> means = {
      (big_reward / eps) * scale, 1.0 * scale,  // the real arm
      0.0, 0.0,                                 // zero-reward dummy
  };
  return Instance::validate({delay, 1}, {eps, 1.0 - eps}, std::move(means),
                            RewardKind::Deterministic);
}

namespace {

void reject_unknown_keys(const nlohmann::json& params,
                         std::initializer_list<const char*> allowed) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) throw ParamError("unknown instance parameter: " + it.key());
  }
}

}  // namespace

Instance named_instance(const std::string& name, const nlohmann::json& params) {
  if (name == "integral") {
    reject_unknown_keys(params, {"gap"});
    return integral_instance(params.at("gap").get<double>());
  }
  if (name == "noninteg_3x3") {
    reject_unknown_keys(params, {});
    return nonintegral_3x3();
  }
  if (name == "noninteg_3x3_d6") {
    reject_unknown_keys(params, {"seed"});
    return nonintegral_3x3_d6(params.at("seed").get<std::uint64_t>());
  }
  if (name == "noninteg_10x10") {
    reject_unknown_keys(params, {"seed"});
    return nonintegral_10x10(params.at("seed").get<std::uint64_t>());
  }
  if (name == "gap_instance") {
    reject_unknown_keys(params, {"k", "delta"});
    return gap_instance(params.at("k").get<int>(), params.at("delta").get<double>());
  }
  if (name == "hardness") {
    reject_unknown_keys(params, {"d", "eps", "R"});
    return hardness_instance(params.at("d").get<int>(), params.at("eps").get<double>(),
                             params.at("R").get<double>());
  }
  throw UnknownNameError("unknown instance name: " + name);
}

}  // namespace cbb
