#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbb/baselines.hpp"
#include "cbb/fi_cbb.hpp"
#include "cbb/harness.hpp"
#include "cbb/ucb_cbb.hpp"
#include "cbb/verify.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// Debug artifacts for the first seed: the bandit policy's per-round trace
// and the full-information availability schedule.
void dump_debug_traces(const cbb::ExperimentConfig& cfg) {
  using namespace cbb;
  const RandomStream stream(RandomStream::derive(cfg.base_seed, 0));
  const std::string prefix = cfg.output_dir + "/" + cfg.instance_tag + "__";
  for (PolicyKind kind : cfg.policies) {
    if (kind == PolicyKind::FiCbb) {
      AvailabilitySchedule sched(
          cfg.instance, solve_lp(cfg.instance, LpObjective::from_means(cfg.instance)));
      sched.dump_csv(prefix + "fi_cbb__schedule.csv", cfg.horizon);
    }
    if (kind == PolicyKind::UcbCbb) {
      UcbCbbOptions opts;
      opts.keep_trace = true;
      UcbCbbPolicy policy(cfg.instance, stream, opts);
      BlockState blocks = BlockState::fresh(cfg.instance);
      for (long t = 1; t <= cfg.horizon; ++t) {
        const int ctx = sample_context(cfg.instance, stream, t);
        RoundOutcome out = policy.decide(t, ctx, blocks);
        if (out.action != kNoArm) {
          out.reward = sample_reward(cfg.instance, out.action, ctx, stream, t);
          policy.observe(t, out.action, ctx, out.reward);
        }
        blocks = apply_action(std::move(blocks), cfg.instance, out.action);
      }
      UcbCbbPolicy::write_trace_csv(prefix + "ucb_cbb__trace_seed0.csv", policy.trace());
    }
  }
}

int do_run(const std::string& config_path, int threads, bool dump_traces) {
  const auto cfg = cbb::ExperimentConfig::from_json(load_json(config_path));
  const auto result = cbb::run_experiment(cfg, threads);
  cbb::write_outputs(cfg, result);
  if (dump_traces) dump_debug_traces(cfg);
  std::cout << "instance " << cfg.instance_tag << ": lp value " << result.lp_value
            << ", alpha " << result.alpha << ", wall " << result.wall_seconds
            << " s\n";
  for (const auto& [kind, series] : result.series)
    std::cout << "  " << cbb::to_string(kind) << ": final mean regret "
              << series.regret_mean.back() << ", block rate "
              << series.block_rate.back() << "\n";
  std::cout << "wrote CSVs to " << cfg.output_dir << "\n";
  return 0;
}

int do_sweep(const std::string& config_path, const std::string& param, int threads) {
  const auto eq = param.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("--param must look like name=v1,v2,...");
  const std::string name = param.substr(0, eq);
  nlohmann::json base = load_json(config_path);
  for (const std::string& value : split(param.substr(eq + 1), ',')) {
    nlohmann::json j = base;
    j.at("instance")[name] = std::stod(value);
    const auto cfg = cbb::ExperimentConfig::from_json(j);
    std::cout << "=== " << name << " = " << value << " ===\n";
    const auto result = cbb::run_experiment(cfg, threads);
    cbb::write_outputs(cfg, result);
    for (const auto& [kind, series] : result.series)
      std::cout << "  " << cbb::to_string(kind) << ": final mean regret "
                << series.regret_mean.back() << "\n";
  }
  return 0;
}

int do_verify(const std::string& level, bool strict) {
  const auto results = cbb::verify_suite(level == "full" ? cbb::VerifyLevel::Full
                                                         : cbb::VerifyLevel::Fast);
  std::cout << cbb::format_report(results);
  if (!strict) return 0;
  for (const auto& r : results)
    if (!r.pass && !r.warn_only) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contextual blocking bandit simulation lab"};
  app.require_subcommand(1);

  std::string config_path, param, level = "fast";
  int threads = 0;
  bool strict = false, dump_traces = false;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--threads", threads, "worker threads (0 = auto)");
  run->add_flag("--dump-traces", dump_traces,
                "also write a seed-0 per-round trace and the availability schedule");

  auto* sweep = app.add_subcommand("sweep", "run a config across parameter values");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--param", param, "instance parameter sweep, e.g. gap=0.4,0.6,0.8")
      ->required();
  sweep->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* verify = app.add_subcommand("verify", "run the property-check suite");
  verify->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));
  verify->add_flag("--strict", strict, "exit nonzero on failed checks");

  auto* hardness = app.add_subcommand("hardness", "competitive-ratio hardness record");
  int hd = 3;
  double heps = 0.1, hr = 0.7;
  hardness->add_option("--d", hd, "blocking delay")->required();
  hardness->add_option("--eps", heps, "rare-context probability")->required();
  hardness->add_option("--R", hr, "rare-context reward mass")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, threads, dump_traces);
    if (sweep->parsed()) return do_sweep(config_path, param, threads);
    if (verify->parsed()) return do_verify(level, strict);
    if (hardness->parsed()) {
      std::cout << cbb::hardness_analysis(hd, heps, hr).to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
