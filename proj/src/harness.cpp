#include "cbb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "cbb/fi_cbb.hpp"
#include "cbb/lp.hpp"
#include "cbb/ucb_cbb.hpp"

namespace cbb {

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::FiCbb: return "fi_cbb";
    case PolicyKind::UcbCbb: return "ucb_cbb";
    case PolicyKind::UcbGreedy: return "ucb_greedy";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "fi_cbb") return PolicyKind::FiCbb;
  if (s == "ucb_cbb") return PolicyKind::UcbCbb;
  if (s == "ucb_greedy") return PolicyKind::UcbGreedy;
  throw ConfigError("unknown policy: " + s);
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) throw ConfigError("unknown key in " + where + ": " + it.key());
  }
}

std::string make_instance_tag(const nlohmann::json& spec) {
  if (!spec.contains("name")) return "custom";
  std::string tag = spec.at("name").get<std::string>();
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (it.key() == "name") continue;
    std::string v;
    if (it.value().is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", it.value().get<double>());
      v = buf;
    } else {
      v = it.value().dump();
    }
    tag += "_" + it.key() + v;
  }
  return tag;
}

Instance resolve_instance(const nlohmann::json& spec) {
  if (spec.contains("name")) {
    nlohmann::json params = spec;
    params.erase("name");
    return named_instance(spec.at("name").get<std::string>(), params);
  }
  reject_unknown(spec, {"k", "m", "delays", "context_probs", "means", "reward_kind"},
                 "instance");
  return Instance::from_json(spec);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"instance", "policies", "horizon", "seeds", "base_seed",
                  "alpha_mode", "output_dir"},
                 "config");
  ExperimentConfig cfg;
  cfg.instance_spec = j.at("instance");
  cfg.instance = resolve_instance(cfg.instance_spec);
  cfg.instance_tag = make_instance_tag(cfg.instance_spec);
  for (const auto& p : j.at("policies"))
    cfg.policies.push_back(policy_kind_from_string(p.get<std::string>()));
  cfg.horizon = j.at("horizon").get<long>();
  cfg.seeds = j.at("seeds").get<int>();
  cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("alpha_mode")) {
    const std::string s = j.at("alpha_mode").get<std::string>();
    if (s == "lp_times_t") cfg.alpha_mode = AlphaMode::LpTimesT;
    else if (s == "exact_oracle") cfg.alpha_mode = AlphaMode::ExactOracle;
    else throw ConfigError("unknown alpha_mode: " + s);
  }
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (cfg.seeds < 1) throw ConfigError("seeds must be >= 1");
  if (cfg.policies.empty()) throw ConfigError("at least one policy required");
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json pol = nlohmann::json::array();
  for (PolicyKind p : policies) pol.push_back(to_string(p));
  return nlohmann::json{
      {"instance", instance_spec},
      {"policies", pol},
      {"horizon", horizon},
      {"seeds", seeds},
      {"base_seed", base_seed},
      {"alpha_mode", alpha_mode == AlphaMode::LpTimesT ? "lp_times_t" : "exact_oracle"},
      {"output_dir", output_dir},
  };
}

namespace {

template <typename Policy>
SingleRun drive(const Instance& inst, Policy& policy, long horizon,
                const RandomStream& stream, std::vector<RoundOutcome>* outcomes) {
  SingleRun run;
  run.events.reserve(horizon);
  run.rewards.reserve(horizon);
  run.cum_reward.reserve(horizon);
  BlockState blocks = BlockState::fresh(inst);
  double cum = 0.0;
  for (long t = 1; t <= horizon; ++t) {
    const int ctx = sample_context(inst, stream, t);
    RoundOutcome out = policy.decide(t, ctx, blocks);
    if (out.action != kNoArm) {
      out.reward = sample_reward(inst, out.action, ctx, stream, t);
      policy.observe(t, out.action, ctx, out.reward);
    }
    blocks = apply_action(std::move(blocks), inst, out.action);
    switch (out.event) {
      case RoundEvent::Play: ++run.plays; break;
      case RoundEvent::LpSkip: ++run.lp_skips; break;
      case RoundEvent::Skip: ++run.skips; break;
      case RoundEvent::Block: ++run.blocks; break;
    }
    cum += out.reward;
    run.events.push_back(out.event);
    run.rewards.push_back(out.reward);
    run.cum_reward.push_back(cum);
    if (outcomes) outcomes->push_back(out);
  }
  run.total_reward = cum;
  return run;
}

}  // namespace

SingleRun run_policy(const Instance& inst, PolicyKind kind, long horizon,
                     const RandomStream& stream, bool diagnostics,
                     std::vector<RoundOutcome>* outcomes) {
  switch (kind) {
    case PolicyKind::FiCbb: {
      FiCbbPolicy policy(inst, solve_lp(inst, LpObjective::from_means(inst)), stream);
      return drive(inst, policy, horizon, stream, outcomes);
    }
    case PolicyKind::UcbCbb: {
      UcbCbbOptions opts;
      opts.track_diagnostics = diagnostics;
      UcbCbbPolicy policy(inst, stream, opts);
      return drive(inst, policy, horizon, stream, outcomes);
    }
    case PolicyKind::UcbGreedy: {
      UcbGreedyPolicy policy(inst);
      return drive(inst, policy, horizon, stream, outcomes);
    }
  }
  throw std::logic_error("unreachable policy kind");
}

namespace {

struct SeedSeries {
  std::vector<double> regret;  // cumulative alpha-regret per round
  std::vector<double> lp_skip, skip, block;  // running rates
  double total_reward = 0.0;
};

SeedSeries seed_series(const Instance& inst, PolicyKind kind, long horizon,
                       std::uint64_t seed, double alpha,
                       const std::vector<double>& round_upper_bound) {
  RandomStream stream(seed);
  SingleRun run = run_policy(inst, kind, horizon, stream);
  SeedSeries s;
  s.regret.resize(horizon);
  s.lp_skip.resize(horizon);
  s.skip.resize(horizon);
  s.block.resize(horizon);
  long lp_skips = 0, skips = 0, blocks = 0;
  for (long t = 1; t <= horizon; ++t) {
    const auto e = run.events[t - 1];
    lp_skips += e == RoundEvent::LpSkip;
    skips += e == RoundEvent::Skip;
    blocks += e == RoundEvent::Block;
    s.regret[t - 1] = alpha * round_upper_bound[t - 1] - run.cum_reward[t - 1];
    s.lp_skip[t - 1] = static_cast<double>(lp_skips) / t;
    s.skip[t - 1] = static_cast<double>(skips) / t;
    s.block[t - 1] = static_cast<double>(blocks) / t;
  }
  s.total_reward = run.total_reward;
  return s;
}

double nearest_rank(std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * n));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  const auto t_start = std::chrono::steady_clock::now();
  const Instance& inst = cfg.instance;
  const long T = cfg.horizon;

  ExperimentResult result;
  result.lp_value = solve_lp(inst, LpObjective::from_means(inst)).value;
  const int d_max = inst.max_delay();
  result.alpha = static_cast<double>(d_max) / (2.0 * d_max - 1.0);

  // Per-prefix upper bound on the optimal reward: t * Rew_LP, or the exact
  // clairvoyant value when requested (tiny horizons only).
  std::vector<double> ub(T);
  if (cfg.alpha_mode == AlphaMode::LpTimesT) {
    for (long t = 1; t <= T; ++t) ub[t - 1] = t * result.lp_value;
  } else {
    for (long t = 1; t <= T; ++t)
      ub[t - 1] = clairvoyant_reward(inst, static_cast<int>(t)).expected_reward;
  }

  if (threads <= 0)
    threads = std::max(1u, std::thread::hardware_concurrency());

  for (PolicyKind kind : cfg.policies) {
    std::vector<SeedSeries> per_seed(cfg.seeds);
    std::atomic<int> next_seed{0};
    auto worker = [&]() {
      while (true) {
        const int s = next_seed.fetch_add(1);
        if (s >= cfg.seeds) return;
        per_seed[s] = seed_series(inst, kind, T,
                                  RandomStream::derive(cfg.base_seed, s),
                                  result.alpha, ub);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(threads, cfg.seeds); ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    MetricSeries series;
    series.regret_mean.resize(T);
    series.regret_q25.resize(T);
    series.regret_q75.resize(T);
    series.lp_skip_rate.resize(T);
    series.skip_rate.resize(T);
    series.block_rate.resize(T);
    std::vector<double> column(cfg.seeds);
    for (long t = 0; t < T; ++t) {
      double mean = 0.0, lp = 0.0, sk = 0.0, bl = 0.0;
      for (int s = 0; s < cfg.seeds; ++s) {
        column[s] = per_seed[s].regret[t];
        mean += column[s];
        lp += per_seed[s].lp_skip[t];
        sk += per_seed[s].skip[t];
        bl += per_seed[s].block[t];
      }
      std::sort(column.begin(), column.end());
      series.regret_mean[t] = mean / cfg.seeds;
      series.regret_q25[t] = nearest_rank(column, 0.25);
      series.regret_q75[t] = nearest_rank(column, 0.75);
      series.lp_skip_rate[t] = lp / cfg.seeds;
      series.skip_rate[t] = sk / cfg.seeds;
      series.block_rate[t] = bl / cfg.seeds;
    }
    series.final_reward_per_seed.resize(cfg.seeds);
    for (int s = 0; s < cfg.seeds; ++s)
      series.final_reward_per_seed[s] = per_seed[s].total_reward;
    result.series.emplace(kind, std::move(series));
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

std::string metric_csv(const MetricSeries& s) {
  std::string out = "t,regret_mean,regret_q25,regret_q75,lp_skip_rate,skip_rate,block_rate\n";
  char line[256];
  for (std::size_t t = 0; t < s.regret_mean.size(); ++t) {
    std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  t + 1, s.regret_mean[t], s.regret_q25[t], s.regret_q75[t],
                  s.lp_skip_rate[t], s.skip_rate[t], s.block_rate[t]);
    out += line;
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string dump = cfg.to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string git_describe() {
  FILE* pipe = popen("git describe --always --dirty 2>/dev/null", "r");
  if (!pipe) return "unknown";
  char buf[128] = {0};
  std::string out;
  while (fgets(buf, sizeof(buf), pipe)) out += buf;
  pclose(pipe);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out.empty() ? "unknown" : out;
}

}  // namespace

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  for (const auto& [kind, series] : result.series) {
    const fs::path path =
        fs::path(cfg.output_dir) / (cfg.instance_tag + "__" + to_string(kind) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << metric_csv(series);
  }
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  nlohmann::json meta{
      {"config_hash", hash_hex},
      {"git_describe", git_describe()},
      {"wall_time_seconds", result.wall_seconds},
      {"lp_value", result.lp_value},
      {"alpha", result.alpha},
      {"config", cfg.to_json()},
  };
  const fs::path meta_path =
      fs::path(cfg.output_dir) / (cfg.instance_tag + "__metadata.json");
  std::ofstream mout(meta_path);
  mout << meta.dump(2) << "\n";
}

}  // namespace cbb
