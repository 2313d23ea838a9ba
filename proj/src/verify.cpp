#include "cbb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "cbb/baselines.hpp"
#include "cbb/environment.hpp"
#include "cbb/fi_cbb.hpp"
#include "cbb/harness.hpp"
#include "cbb/instance.hpp"
#include "cbb/lp.hpp"
#include "cbb/random.hpp"
#include "cbb/ucb_cbb.hpp"

namespace cbb {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

double binom_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

Instance random_small_instance(std::uint64_t seed, int max_k = 2, int max_m = 2,
                               int max_d = 3) {
  RandomStream rng(seed);
  const int k = 1 + static_cast<int>(rng.uniform(Purpose::Generic, 1) * max_k);
  const int m = 1 + static_cast<int>(rng.uniform(Purpose::Generic, 2) * max_m);
  std::vector<int> delays(k);
  for (int i = 0; i < k; ++i)
    delays[i] = 1 + static_cast<int>(rng.uniform(Purpose::Generic, 3, i) * max_d);
  std::vector<double> probs(m);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    probs[j] = 0.05 + rng.uniform(Purpose::Generic, 4, j);
    total += probs[j];
  }
  for (double& p : probs) p /= total;
  std::vector<double> means(static_cast<std::size_t>(k) * m);
  for (std::size_t p = 0; p < means.size(); ++p)
    means[p] = rng.uniform(Purpose::Generic, 5, p);
  return Instance::validate(std::move(delays), std::move(probs), std::move(means));
}

bool vertex_feasible(const Instance& inst, const ExtremePoint& v) {
  const int k = inst.num_arms(), m = inst.num_contexts();
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      if (v.at(i, j) < -1e-12) return false;
      row += v.at(i, j);
    }
    if (row > 1.0 / inst.delay(i) + 1e-9) return false;
  }
  for (int j = 0; j < m; ++j) {
    double col = 0.0;
    for (int i = 0; i < k; ++i) col += v.at(i, j);
    if (col > inst.context_prob(j) + 1e-9) return false;
  }
  return static_cast<int>(v.support.size()) <= k + m;
}

using Check = std::function<CheckResult()>;

CheckResult check_named_instances() {
  CheckResult r{"named_instances_validate", true, false, ""};
  try {
    integral_instance(0.4);
    integral_instance(0.8);
    nonintegral_3x3();
    nonintegral_3x3_d6(1);
    nonintegral_10x10(1);
    gap_instance(3, 0.9);
    hardness_instance(3, 0.1, 0.7);
    r.measured = "all canonical instances valid";
  } catch (const std::exception& e) {
    r.pass = false;
    r.measured = e.what();
  }
  return r;
}

CheckResult check_tp_groups() {
  CheckResult r{"tp_group_strict_boundaries", true, false, ""};
  // oracle: direct inequality scan
  auto scan = [](double z) {
    for (int l = 1; l <= 1100; ++l)
      if (std::ldexp(1.0, -l) < z && z <= std::ldexp(1.0, -l + 1)) return l;
    return -1;
  };
  RandomStream rng(99);
  int checked = 0;
  for (int n = 0; n < 2000; ++n) {
    const double z = std::max(1e-12, rng.uniform(Purpose::Generic, 7, n));
    if (tp_group_index(z) != scan(z)) {
      r.pass = false;
      r.measured = fmt("mismatch at z=%.17g", z);
      return r;
    }
    ++checked;
  }
  for (double z : {1.0, 0.5, 0.25, 0.3}) {
    if (tp_group_index(z) != scan(z)) {
      r.pass = false;
      r.measured = fmt("boundary mismatch at z=%g", z);
      return r;
    }
  }
  r.measured = fmt("%g random + boundary values agree with the scan oracle",
                   static_cast<double>(checked));
  return r;
}

CheckResult check_delay_constants() {
  CheckResult r{"delay_schedule_constants", true, false, ""};
  const double e2 = std::exp(2.0);
  const double c1 = e2 / (e2 - 1.0);
  for (int d = 1; d <= 50; ++d) {
    const double c0 = std::exp(1.0) * std::pow(c1, 2.0 * d);
    const long lhs = static_cast<long>(std::ceil(std::log(c0) / std::log(c1))) + 1;
    if (lhs != 2L * d + 8) {
      r.pass = false;
      r.measured = fmt("ceil identity fails at d=%g", d);
      return r;
    }
  }
  for (int d = 1; d <= 100; ++d) {
    const long tc = critical_time(d);
    if (tc < 2L * d + 67 || tc > 3L * d + 71) {
      r.pass = false;
      r.measured = fmt("T_c out of bounds at d=%g: %g", d, static_cast<double>(tc));
      return r;
    }
  }
  // M_t unit increases and monotone lag past the critical time
  for (int d : {1, 3, 9}) {
    const long tc = critical_time(d);
    long prev_m = delay_m(tc - 1, d), prev_lag = tc - 1 - delay_m(tc - 1, d);
    for (long t = tc; t <= tc + 5000; ++t) {
      const long m = delay_m(t, d);
      const long lag = t - m;
      if (m > prev_m + 1 || lag < prev_lag || lag > prev_lag + 1) {
        r.pass = false;
        r.measured = fmt("lag fact violated at d=%g t=%g", d, static_cast<double>(t));
        return r;
      }
      prev_m = m;
      prev_lag = lag;
    }
  }
  r.measured = "ceil identity (d<=50), T_c bounds (d<=100), unit lag increases";
  return r;
}

CheckResult check_lp_against_enumeration() {
  CheckResult r{"lp_solver_vs_vertex_enumeration", true, false, ""};
  double worst = 0.0;
  for (int n = 0; n < 25; ++n) {
    const Instance inst = random_small_instance(1000 + n, 3, 3, 4);
    const auto verts = enumerate_extreme_points(inst);
    const LpObjective obj = LpObjective::from_means(inst);
    double best = 0.0;
    for (const auto& v : verts) best = std::max(best, v.value_under(obj));
    const ExtremePoint sol = solve_lp(inst, obj);
    worst = std::max(worst, std::abs(sol.value - best));
    if (std::abs(sol.value - best) > 1e-9 || !vertex_feasible(inst, sol)) {
      r.pass = false;
      r.measured = fmt("value gap %.3g on instance %g", sol.value - best, n);
      return r;
    }
    // the returned point must be one of the enumerated vertices
    bool found = false;
    for (const auto& v : verts) {
      bool same = true;
      for (std::size_t p = 0; p < v.z.size(); ++p)
        if (std::abs(v.z[p] - sol.z[p]) > 1e-8) same = false;
      if (same) found = true;
    }
    if (!found) {
      r.pass = false;
      r.measured = fmt("solution is not a polytope vertex on instance %g", n);
      return r;
    }
  }
  r.measured = fmt("25 random instances, worst value gap %.2g", worst);
  return r;
}

CheckResult check_lp_scaling() {
  CheckResult r{"lp_solution_scale_invariance", true, false, ""};
  for (int n = 0; n < 10; ++n) {
    const Instance inst = random_small_instance(2000 + n, 3, 3, 4);
    LpObjective obj = LpObjective::from_means(inst);
    for (double& w : obj.w) w = 0.1 + 0.9 * w;  // keep weights away from zero
    const ExtremePoint base = solve_lp(inst, obj);
    for (double scale : {0.5, 2.0, 4.0}) {
      LpObjective scaled = obj;
      for (double& w : scaled.w) w *= scale;
      const ExtremePoint other = solve_lp(inst, scaled);
      for (std::size_t p = 0; p < base.z.size(); ++p)
        if (base.z[p] != other.z[p]) {
          r.pass = false;
          r.measured = fmt("z changed under scale %g", scale);
          return r;
        }
    }
  }
  r.measured = "identical vertices under weight scales 0.5/2/4";
  return r;
}

CheckResult check_gap_formulas() {
  CheckResult r{"suboptimality_gap_formulas", true, false, ""};
  const GapReport rep = compute_gaps(gap_instance(3, 0.9));
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want = (i == j) ? 0.3 : 0.6;
      worst = std::max(worst, std::abs(rep.delta_min_at(i, j, 3) - want));
    }
  // every vertex coordinate of the structured instance is 0 or 1/k
  const auto verts = enumerate_extreme_points(gap_instance(2, 0.5));
  for (const auto& v : verts)
    for (double z : v.z)
      if (std::abs(z) > 1e-9 && std::abs(z - 0.5) > 1e-9) {
        r.pass = false;
        r.measured = fmt("vertex coordinate %g not in {0, 1/2}", z);
        return r;
      }
  const double lp_val = solve_lp(gap_instance(3, 0.9),
                                 LpObjective::from_means(gap_instance(3, 0.9))).value;
  if (worst > 1e-9 || std::abs(lp_val - 0.9) > 1e-9) {
    r.pass = false;
    r.measured = fmt("delta err %.3g, lp value %.12g", worst, lp_val);
    return r;
  }
  r.measured = fmt("delta_min diag 0.3 / off 0.6 within %.2g, lp value 0.9", worst);
  return r;
}

Instance two_arm_fixture() {
  return Instance::validate({2, 3}, {0.6, 0.4}, {0.9, 0.2, 0.1, 0.8});
}

CheckResult check_fi_schedule() {
  CheckResult r{"fi_availability_recursion", true, false, ""};
  // hand-unrolled single-arm case: d=2, sum_j z = 1/2
  Instance one = Instance::validate({2}, {1.0}, {1.0});
  ExtremePoint z;
  z.k = 1;
  z.m = 1;
  z.z = {0.5};
  z.finalize(LpObjective::from_means(one));
  AvailabilitySchedule sched(one, z);
  const double q2 = sched.q(0, 2), q3 = sched.q(0, 3), b1 = sched.beta(0, 1);
  if (std::abs(sched.q(0, 1) - 1.0) > 1e-12 || std::abs(q2 - 2.0 / 3) > 1e-12 ||
      std::abs(q3 - 2.0 / 3) > 1e-12 || std::abs(b1 - 2.0 / 3) > 1e-12 ||
      std::abs(sched.beta(0, 2) - 1.0) > 1e-12) {
    r.pass = false;
    r.measured = fmt("q2=%.12g q3=%.12g b1=%.12g", q2, q3, b1);
    return r;
  }

  // Monte-Carlo: empirical availability frequency matches q_{i,t}
  const Instance inst = two_arm_fixture();
  const ExtremePoint zs = solve_lp(inst, LpObjective::from_means(inst));
  const int runs = 40000, horizon = 25;
  std::vector<std::vector<long>> avail(inst.num_arms(), std::vector<long>(horizon, 0));
  for (int run = 0; run < runs; ++run) {
    RandomStream stream(RandomStream::derive(42421, run));
    FiCbbPolicy policy(inst, zs, stream);
    BlockState blocks = BlockState::fresh(inst);
    for (long t = 1; t <= horizon; ++t) {
      for (int i = 0; i < inst.num_arms(); ++i)
        avail[i][t - 1] += blocks.available(i);
      const int ctx = sample_context(inst, stream, t);
      const RoundOutcome out = policy.decide(t, ctx, blocks);
      blocks = apply_action(std::move(blocks), inst, out.action);
    }
  }
  AvailabilitySchedule sched2(inst, zs);
  double worst_sigmas = 0.0;
  for (int i = 0; i < inst.num_arms(); ++i)
    for (long t = 1; t <= horizon; ++t) {
      const double q = sched2.q(i, t);
      const double freq = static_cast<double>(avail[i][t - 1]) / runs;
      const double sigma = std::max(binom_sigma(q, runs), 1e-9);
      worst_sigmas = std::max(worst_sigmas, std::abs(freq - q) / sigma);
    }
  r.pass = worst_sigmas <= 5.0;
  r.measured = fmt("worst availability deviation %.2f sigma over %g cells",
                   worst_sigmas, static_cast<double>(inst.num_arms() * horizon));
  return r;
}

CheckResult check_fi_exact_play(int runs) {
  CheckResult r{"fi_exact_play_probability", true, false, ""};
  const Instance inst = two_arm_fixture();
  const ExtremePoint zs = solve_lp(inst, LpObjective::from_means(inst));
  const int horizon = 20;
  const int m = inst.num_contexts();
  std::vector<long> plays(static_cast<std::size_t>(inst.num_arms()) * m * horizon, 0);
  for (int run = 0; run < runs; ++run) {
    RandomStream stream(RandomStream::derive(5150, run));
    FiCbbPolicy policy(inst, zs, stream);
    BlockState blocks = BlockState::fresh(inst);
    for (long t = 1; t <= horizon; ++t) {
      const int ctx = sample_context(inst, stream, t);
      const RoundOutcome out = policy.decide(t, ctx, blocks);
      if (out.action != kNoArm)
        ++plays[(static_cast<std::size_t>(out.action) * m + ctx) * horizon + t - 1];
      blocks = apply_action(std::move(blocks), inst, out.action);
    }
  }
  double worst_sigmas = 0.0;
  int cells = 0;
  for (int i = 0; i < inst.num_arms(); ++i)
    for (int j = 0; j < m; ++j) {
      if (zs.at(i, j) <= 0.0) continue;
      const double cap = inst.delay(i) / (2.0 * inst.delay(i) - 1.0);
      const double p = cap * zs.at(i, j);
      for (long t = 1; t <= horizon; ++t) {
        const double freq =
            static_cast<double>(plays[(static_cast<std::size_t>(i) * m + j) * horizon + t - 1]) /
            runs;
        worst_sigmas = std::max(worst_sigmas,
                                std::abs(freq - p) / binom_sigma(p, runs));
        ++cells;
      }
    }
  r.pass = worst_sigmas <= 5.0;
  r.measured = fmt("worst play-rate deviation %.2f sigma over %g cells (n=%g)",
                   worst_sigmas, cells, runs);
  return r;
}

CheckResult check_compq_matches_fi() {
  CheckResult r{"compq_equals_fi_recursion_before_critical", true, false, ""};
  const Instance inst = two_arm_fixture();
  RandomStream stream(777);
  UcbCbbPolicy policy(inst, stream);
  BlockState blocks = BlockState::fresh(inst);
  const long horizon = std::min<long>(60, policy.critical_round() - 1);
  for (long t = 1; t <= horizon; ++t) {
    const int ctx = sample_context(inst, stream, t);
    const RoundOutcome out = policy.decide(t, ctx, blocks);
    if (out.action != kNoArm)
      policy.observe(t, out.action, ctx, sample_reward(inst, out.action, ctx, stream, t));
    blocks = apply_action(std::move(blocks), inst, out.action);
  }
  AvailabilitySchedule sched(inst, policy.log().at(0));
  double worst = 0.0;
  for (int arm = 0; arm < inst.num_arms(); ++arm)
    for (long t = 1; t <= horizon; ++t)
      worst = std::max(worst, std::abs(policy.compq(arm, t) - sched.q(arm, t)));
  r.pass = worst <= 1e-12;
  r.measured = fmt("max |compq - q(Z0)| = %.3g before T_c=%g", worst,
                   static_cast<double>(policy.critical_round()));
  return r;
}

CheckResult check_ucb_determinism() {
  CheckResult r{"ucb_run_determinism", true, false, ""};
  const Instance inst = nonintegral_3x3();
  std::vector<RoundOutcome> a, b;
  RandomStream s1(314), s2(314);
  run_policy(inst, PolicyKind::UcbCbb, 400, s1, false, &a);
  run_policy(inst, PolicyKind::UcbCbb, 400, s2, false, &b);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].action != b[i].action || a[i].event != b[i].event ||
        a[i].reward != b[i].reward || a[i].context != b[i].context) {
      r.pass = false;
      r.measured = fmt("trace diverged at round %g", static_cast<double>(i + 1));
      return r;
    }
  r.measured = "two seeded runs produced identical traces (400 rounds)";
  return r;
}

CheckResult check_hardness_closed_form(int triples) {
  CheckResult r{"hardness_grid_vs_closed_form", true, false, ""};
  RandomStream rng(808);
  double worst = 0.0;
  for (int n = 0; n < triples; ++n) {
    const int d = 2 + static_cast<int>(rng.uniform(Purpose::Generic, 10, n) * 7);
    const double eps = 0.01 + 0.2 * rng.uniform(Purpose::Generic, 11, n);
    // stay in the regime R > eps + 1/(d-1), away from the degenerate tie
    const double big_r =
        eps + 1.0 / (d - 1) + 0.05 + rng.uniform(Purpose::Generic, 12, n);
    const HardnessReport rep = hardness_analysis(d, eps, big_r);
    const double closed = big_r / (1.0 + (d - 1) * eps);
    worst = std::max(worst, std::abs(rep.f_opt - closed));
    if (std::abs(rep.f_opt - closed) > 1e-6 || rep.q1_opt != 1.0 || rep.q2_opt != 0.0) {
      r.pass = false;
      r.measured = fmt("triple %g: f_opt %.9g vs closed %.9g", n, rep.f_opt, closed);
      return r;
    }
  }
  // complementary regime attains (1,1) with value (R+1-eps)/d
  const HardnessReport low = hardness_analysis(3, 0.1, 0.3);
  if (low.q1_opt != 1.0 || low.q2_opt != 1.0 ||
      std::abs(low.f_opt - (0.3 + 0.9) / 3.0) > 1e-9) {
    r.pass = false;
    r.measured = fmt("low regime optimum wrong: f=%.9g q2=%g", low.f_opt, low.q2_opt);
    return r;
  }
  r.measured = fmt("%g triples, worst |grid - closed| = %.2g", triples, worst);
  return r;
}

CheckResult check_clairvoyant_small() {
  CheckResult r{"clairvoyant_dp_small_cases", true, false, ""};
  const Instance a = Instance::validate({1}, {1.0}, {1.0});
  const Instance b = Instance::validate({2}, {1.0}, {1.0});
  const double ra = clairvoyant_reward(a, 5).expected_reward;
  const double rb = clairvoyant_reward(b, 5).expected_reward;
  // unit delays: pointwise best arm per context
  const Instance c = Instance::validate({1, 1}, {0.3, 0.7}, {0.9, 0.2, 0.4, 0.6});
  const double rc = clairvoyant_reward(c, 4).expected_reward;
  const double want_c = 4 * (0.3 * 0.9 + 0.7 * 0.6);
  if (std::abs(ra - 5.0) > 1e-9 || std::abs(rb - 3.0) > 1e-9 ||
      std::abs(rc - want_c) > 1e-9) {
    r.pass = false;
    r.measured = fmt("ra=%g rb=%g rc=%g", ra, rb, rc);
    return r;
  }
  r.measured = "d=1 plays every round; d=2 plays ceil(T/2); unit-delay closed form";
  return r;
}

CheckResult check_lp_oracle_upper_bound(int instances) {
  CheckResult r{"lp_upper_bounds_clairvoyant", true, false, ""};
  double worst_slack = 0.0;
  for (int n = 0; n < instances; ++n) {
    const Instance inst = random_small_instance(3000 + n);
    const int d_max = inst.max_delay();
    for (int horizon : {2, 5, 8}) {
      const double lp = solve_lp(inst, LpObjective::from_means(inst)).value;
      const double oracle = clairvoyant_reward(inst, horizon).expected_reward;
      const double lhs = horizon * lp;
      const double rhs =
          (1.0 - static_cast<double>(d_max - 1) / (d_max - 1 + horizon)) * oracle;
      worst_slack = std::min(worst_slack, lhs - rhs);
      if (lhs < rhs - 1e-9) {
        r.pass = false;
        r.measured = fmt("violated on instance %g horizon %g by %.3g", n, horizon,
                         rhs - lhs);
        return r;
      }
    }
  }
  r.measured = fmt("%g instances x 3 horizons, min slack %.3g", instances, worst_slack);
  return r;
}

CheckResult check_fi_competitive(int seeds) {
  CheckResult r{"fi_competitive_ratio_bound", true, false, ""};
  const long horizon = 2000;
  const int t0 = 6;
  for (int n = 0; n < 3; ++n) {
    const Instance inst = random_small_instance(4000 + n);
    const int d_max = inst.max_delay();
    const double alpha = d_max / (2.0 * d_max - 1.0);
    const double oracle_rate = clairvoyant_reward(inst, t0).expected_reward / t0;
    const double factor = 1.0 - static_cast<double>(d_max - 1) / (d_max - 1 + t0);
    std::vector<double> totals(seeds);
    for (int s = 0; s < seeds; ++s) {
      RandomStream stream(RandomStream::derive(6200 + n, s));
      totals[s] = run_policy(inst, PolicyKind::FiCbb, horizon, stream).total_reward;
    }
    const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / seeds;
    double var = 0.0;
    for (double v : totals) var += (v - mean) * (v - mean);
    const double sem = std::sqrt(var / (seeds - 1) / seeds);
    const double bound = alpha * factor * oracle_rate * horizon;
    if (mean < bound - 3.0 * sem) {
      r.pass = false;
      r.measured = fmt("instance %g: mean %.4g < bound %.4g", n, mean, bound);
      return r;
    }
  }
  r.measured = fmt("3 instances, horizon %g, %g seeds each",
                   static_cast<double>(horizon), seeds);
  return r;
}

CheckResult check_compq_monte_carlo() {
  CheckResult r{"compq_matches_continuation_frequency", true, false, ""};
  const Instance inst = Instance::validate({2}, {1.0}, {0.7});
  RandomStream stream(2718);
  UcbCbbPolicy policy(inst, stream);
  BlockState blocks = BlockState::fresh(inst);
  const long target = policy.critical_round() + 4;
  std::vector<long> play_rounds;
  for (long t = 1; t <= target; ++t) {
    const int ctx = sample_context(inst, stream, t);
    const RoundOutcome out = policy.decide(t, ctx, blocks);
    if (out.action != kNoArm) {
      policy.observe(t, out.action, ctx, sample_reward(inst, out.action, ctx, stream, t));
      play_rounds.push_back(t);
    }
    blocks = apply_action(std::move(blocks), inst, out.action);
  }
  const double q_claimed = policy.compq(0, target);
  const long tau0 = policy.used_index(target);

  // deterministic restart state: the last play at or before tau0
  long last_play = 0;
  for (long rp : play_rounds)
    if (rp <= tau0) last_play = rp;
  const int d = inst.delay(0);
  const long runs = 100000;
  long free_at_target = 0;
  RandomStream mc(987123);
  for (long run = 0; run < runs; ++run) {
    long blocked_until = last_play > 0 ? last_play + d : 1;  // first free round
    std::uint64_t dial = 0;
    for (long tau = tau0 + 1; tau < target; ++tau) {
      if (tau < blocked_until) continue;
      const double zrow = policy.log().at(policy.used_index(tau)).row_sum(0);
      const double beta = std::min(1.0, (d / (2.0 * d - 1.0)) / policy.compq(0, tau));
      const double u = mc.uniform(Purpose::Generic, run, dial++);
      const double v = mc.uniform(Purpose::Generic, run, dial++);
      if (u < zrow && v <= beta) blocked_until = tau + d;  // played
    }
    free_at_target += target >= blocked_until;
  }
  const double freq = static_cast<double>(free_at_target) / runs;
  const double sigma = binom_sigma(q_claimed, runs);
  const double sigmas = std::abs(freq - q_claimed) / std::max(sigma, 1e-9);
  r.pass = sigmas <= 5.0;
  r.measured = fmt("compq %.5f vs continuation %.5f (%.2f sigma)", q_claimed, freq, sigmas);
  return r;
}

CheckResult check_ucb_block_rate() {
  CheckResult r{"ucb_block_rate_integral", true, false, ""};
  const Instance inst = integral_instance(0.8);
  const long horizon = 6000;
  double rate = 0.0;
  const int seeds = 4;
  for (int s = 0; s < seeds; ++s) {
    RandomStream stream(RandomStream::derive(8800, s));
    const SingleRun run = run_policy(inst, PolicyKind::UcbCbb, horizon, stream);
    rate += static_cast<double>(run.blocks) / horizon;
  }
  rate /= seeds;
  r.pass = rate > 0.32 && rate < 0.48;
  r.measured = fmt("block rate %.4f over %g seeds (expect near 0.4)", rate, seeds);
  return r;
}

CheckResult check_subsample_diagnostic() {
  CheckResult r{"counter_sample_subsampling_diagnostic", true, true, ""};
  const Instance inst = integral_instance(0.6);
  long long bad = 0;
  const long horizon = 4000;
  for (int s = 0; s < 2; ++s) {
    RandomStream stream(RandomStream::derive(9900, s));
    UcbCbbOptions opts;
    opts.track_diagnostics = true;
    UcbCbbPolicy policy(inst, stream, opts);
    BlockState blocks = BlockState::fresh(inst);
    for (long t = 1; t <= horizon; ++t) {
      const int ctx = sample_context(inst, stream, t);
      const RoundOutcome out = policy.decide(t, ctx, blocks);
      if (out.action != kNoArm)
        policy.observe(t, out.action, ctx, sample_reward(inst, out.action, ctx, stream, t));
      blocks = apply_action(std::move(blocks), inst, out.action);
    }
    bad += policy.diag_bad_events();
  }
  r.pass = bad <= 10;
  r.measured = fmt("%g red-flag rounds over 2 runs of %g rounds",
                   static_cast<double>(bad), static_cast<double>(horizon));
  return r;
}

CheckResult check_reproducible_outputs() {
  CheckResult r{"experiment_csv_reproducibility", true, false, ""};
  nlohmann::json cfg_json{
      {"instance", {{"name", "integral"}, {"gap", 0.4}}},
      {"policies", {"fi_cbb", "ucb_cbb", "ucb_greedy"}},
      {"horizon", 60},
      {"seeds", 3},
      {"base_seed", 7},
  };
  const ExperimentConfig cfg = ExperimentConfig::from_json(cfg_json);
  const ExperimentResult a = run_experiment(cfg, 2);
  const ExperimentResult b = run_experiment(cfg, 1);
  for (const auto& [kind, series] : a.series)
    if (metric_csv(series) != metric_csv(b.series.at(kind))) {
      r.pass = false;
      r.measured = std::string("CSV differs for ") + to_string(kind);
      return r;
    }
  r.measured = "byte-identical CSVs across thread counts";
  return r;
}

}  // namespace

std::vector<CheckResult> verify_suite(VerifyLevel level) {
  std::vector<Check> checks = {
      check_named_instances,
      check_tp_groups,
      check_delay_constants,
      check_lp_against_enumeration,
      check_lp_scaling,
      check_gap_formulas,
      check_fi_schedule,
      [] { return check_fi_exact_play(30000); },
      check_compq_matches_fi,
      check_ucb_determinism,
      [] { return check_hardness_closed_form(20); },
      check_clairvoyant_small,
  };
  if (level == VerifyLevel::Full) {
    checks.push_back([] { return check_lp_oracle_upper_bound(20); });
    checks.push_back([] { return check_fi_competitive(40); });
    checks.push_back(check_compq_monte_carlo);
    checks.push_back(check_ucb_block_rate);
    checks.push_back(check_subsample_diagnostic);
    checks.push_back(check_reproducible_outputs);
  }
  std::vector<CheckResult> results;
  results.reserve(checks.size());
  for (const auto& c : checks) results.push_back(c());
  return results;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += r.pass ? "[PASS] " : (r.warn_only ? "[WARN] " : "[FAIL] ");
    out += r.name;
    out += ": ";
    out += r.measured;
    out += "\n";
  }
  int failed = 0;
  for (const auto& r : results) failed += !r.pass && !r.warn_only;
  out += fmt("%g/%g checks passed\n",
             static_cast<double>(results.size() - failed),
             static_cast<double>(results.size()));
  return out;
}

}  // namespace cbb
