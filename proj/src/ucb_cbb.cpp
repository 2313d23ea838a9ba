#include "cbb/ucb_cbb.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cbb {

namespace {

const double kLnC1 = std::log(std::exp(2.0) / (std::exp(2.0) - 1.0));
constexpr double kQFloor = 1e-15;

}  // namespace

double ucb_index(double emp_mean, long long pulls, double t) {
  if (pulls == 0) return 1.0;
  return std::min(1.0, emp_mean + std::sqrt(3.0 * std::log(t) / (2.0 * pulls)));
}

long delay_m_raw(long t, int d_max) {
  return static_cast<long>(std::floor(2.0 * std::log(static_cast<double>(t)) / kLnC1)) +
         2L * d_max + 8;
}

long delay_m(long t, int d_max) {
  const long raw = delay_m_raw(t, d_max);
  return t <= raw ? t : raw;
}

long critical_time(int d_max) {
  for (long t = 1; t <= 4'000'000; ++t)
    if (t - delay_m_raw(t, d_max) >= 1) return t;
  throw std::logic_error("critical_time: scan exhausted");
}

void UcbState::init(int k_arms, int m_contexts) {
  k = k_arms;
  m = m_contexts;
  pulls.assign(static_cast<std::size_t>(k) * m, 0);
  reward_sum.assign(static_cast<std::size_t>(k) * m, 0.0);
  tp_counters.assign(static_cast<std::size_t>(k) * m, {});
}

double UcbState::emp_mean(int i, int j) const {
  const auto p = pulls[i * m + j];
  return p == 0 ? 0.0 : reward_sum[i * m + j] / p;
}

double UcbState::index(int i, int j, double t) const {
  return ucb_index(emp_mean(i, j), pulls[i * m + j], t);
}

LpObjective UcbState::index_objective(double t) const {
  LpObjective obj;
  obj.k = k;
  obj.m = m;
  obj.w.resize(static_cast<std::size_t>(k) * m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) obj.w[i * m + j] = index(i, j, t);
  return obj;
}

std::uint64_t UcbState::tp_count(int i, int j, int l) const {
  const auto& v = tp_counters[i * m + j];
  return (l >= 1 && l <= static_cast<int>(v.size())) ? v[l - 1] : 0;
}

const ExtremePoint& ExtremePointLog::at(long tau) const {
  auto it = by_tau_.find(tau);
  if (it == by_tau_.end())
    throw HistoryGapError("extreme point log has no entry for round " +
                          std::to_string(tau));
  return it->second;
}

void ExtremePointLog::append(long tau, ExtremePoint zp) {
  if (!by_tau_.emplace(tau, std::move(zp)).second)
    throw std::logic_error("extreme point log entry " + std::to_string(tau) +
                           " written twice");
}

void CompQCache::init(int k_arms) { arms_.assign(k_arms, {}); }

bool CompQCache::has(int arm, long t) const {
  const auto& w = arms_[arm];
  return t >= w.base && t < w.base + static_cast<long>(w.q.size());
}

double CompQCache::get(int arm, long t) const {
  const auto& w = arms_[arm];
  if (!has(arm, t))
    throw HistoryGapError("compq cache miss for arm " + std::to_string(arm) +
                          " round " + std::to_string(t));
  return w.q[t - w.base];
}

void CompQCache::push(int arm, long t, double v) {
  auto& w = arms_[arm];
  if (w.q.empty()) w.base = t;
  else if (t != w.base + static_cast<long>(w.q.size()))
    throw std::logic_error("compq cache must be filled contiguously");
  w.q.push_back(v);
}

long CompQCache::end(int arm) const {
  const auto& w = arms_[arm];
  return w.q.empty() ? 0 : w.base + static_cast<long>(w.q.size()) - 1;
}

void CompQCache::evict_below(long floor) {
  for (auto& w : arms_)
    while (!w.q.empty() && w.base < floor) {
      w.q.pop_front();
      ++w.base;
    }
}

UcbCbbPolicy::UcbCbbPolicy(const Instance& inst, RandomStream coins,
                           UcbCbbOptions opts)
    : inst_(inst), coins_(coins), opts_(opts) {
  const int k = inst.num_arms(), m = inst.num_contexts();
  state_.init(k, m);
  cache_.init(k);
  play_cap_.resize(k);
  for (int i = 0; i < k; ++i)
    play_cap_[i] = static_cast<double>(inst.delay(i)) / (2.0 * inst.delay(i) - 1.0);
  t_c_ = critical_time(inst.max_delay());
  play_rounds_.assign(k, {});
  used_index_by_round_.push_back(0);  // index 0 unused
  log_.append(0, solve_lp(inst, LpObjective::ones(k, m)));
}

const ExtremePoint& UcbCbbPolicy::vertex_for(long tau) {
  if (log_.contains(tau)) return log_.at(tau);
  // Solve lazily with the indices frozen at round tau: plays strictly
  // before tau, exploration width ln(tau).
  const Snapshot* snap = nullptr;
  for (const auto& [round, s] : snapshots_)
    if (round == tau) {
      snap = &s;
      break;
    }
  if (snap == nullptr)
    throw HistoryGapError("no state snapshot for round " + std::to_string(tau));
  LpObjective obj;
  obj.k = state_.k;
  obj.m = state_.m;
  obj.w.resize(static_cast<std::size_t>(state_.k) * state_.m);
  for (std::size_t p = 0; p < obj.w.size(); ++p) {
    const auto pulls = snap->pulls[p];
    const double emp = pulls == 0 ? 0.0 : snap->reward_sum[p] / pulls;
    obj.w[p] = ucb_index(emp, pulls, static_cast<double>(tau));
  }
  log_.append(tau, solve_lp_rotated(inst_, obj, tau));
  return log_.at(tau);
}

long UcbCbbPolicy::first_sure_available(int arm, long tau0) const {
  // Latest play at or before tau0 keeps the arm blocked through r+d-1.
  const auto& rounds = play_rounds_[arm];
  auto it = std::upper_bound(rounds.begin(), rounds.end(), tau0);
  if (it == rounds.begin()) return tau0 + 1;
  const long r = *(it - 1);
  return std::max(tau0 + 1, r + inst_.delay(arm));
}

double UcbCbbPolicy::compq_fresh(int arm, long t) const {
  const int d = inst_.delay(arm);
  const double cap = play_cap_[arm];
  const long tau0 = used_index_by_round_[t];
  const long t0 = first_sure_available(arm, tau0);
  if (t0 >= t) return 1.0;

  auto zrow_at = [&](long round) {
    return log_.at(used_index_by_round_[round]).row_sum(arm);
  };
  auto beta_at = [&](long round) {
    return std::min(1.0, cap / cache_.get(arm, round));
  };

  // q over [t0, t] conditioned on the lag-M_t history; the betas come from
  // the per-round conditionals already memoized.
  std::vector<double> q(t - t0 + 1);
  q[0] = 1.0;
  for (long tp = t0; tp < t; ++tp) {
    double next = q[tp - t0] * (1.0 - beta_at(tp) * zrow_at(tp));
    const long t2 = tp - d + 1;
    if (t2 >= t0) next += q[t2 - t0] * beta_at(t2) * zrow_at(t2);
    q[tp + 1 - t0] = std::clamp(next, kQFloor, 1.0);
  }
  return q[t - t0];
}

void UcbCbbPolicy::advance_compq(long t) {
  for (int arm = 0; arm < inst_.num_arms(); ++arm) {
    if (inst_.delay(arm) == 1) continue;
    for (long tau = cache_.end(arm) + 1; tau <= t; ++tau)
      cache_.push(arm, tau, compq_fresh(arm, tau));
  }
}

double UcbCbbPolicy::compq(int arm, long t) {
  if (inst_.delay(arm) == 1) return 1.0;
  return cache_.get(arm, t);
}

void UcbCbbPolicy::run_diagnostics(long t) {
  // Red-flag scan: a TP-group counter that is large while the pair has
  // been played too rarely relative to 2^-l of the counter.
  const double ln_t = std::log(static_cast<double>(t));
  bool bad = false;
  for (int p = 0; p < state_.k * state_.m && !bad; ++p) {
    const auto& counters = state_.tp_counters[p];
    for (int l = 1; l <= static_cast<int>(counters.size()); ++l) {
      const double s = static_cast<double>(counters[l - 1]);
      if (s <= 0.0) continue;
      const double pow2l = std::ldexp(1.0, l);
      if (s < 109.0 * std::exp(1.0) * pow2l * ln_t) continue;
      const double lhs = static_cast<double>(state_.pulls[p]);
      if (lhs <= s / (24.0 * std::exp(1.0) * pow2l)) {
        bad = true;
        break;
      }
    }
  }
  if (bad) ++diag_bad_events_;
}

RoundOutcome UcbCbbPolicy::decide(long t, int context, const BlockState& blocks) {
  if (t != last_t_ + 1)
    throw std::logic_error("ucb-cbb rounds must be stepped in order");
  last_t_ = t;

  if (opts_.track_diagnostics && t > 1) run_diagnostics(t);

  const long m_t = delay_m(t, inst_.max_delay());
  const long tau = t - m_t;
  // Monotone synchronization: M_t grows by at most one per round past the
  // critical time, so the lag index never moves backwards.
  if (t >= t_c_ && m_t > prev_m_ + 1)
    throw std::logic_error("delayed-exploitation lag jumped by more than one");
  if (tau < prev_tau_ || tau > prev_tau_ + 1)
    throw std::logic_error("lagged round index is not monotone");
  if ((t < t_c_) != (tau <= 0))
    throw std::logic_error("critical time does not split the lag sign");
  prev_m_ = m_t;
  prev_tau_ = tau;

  snapshots_.emplace_back(t, Snapshot{state_.pulls, state_.reward_sum});
  while (!snapshots_.empty() && snapshots_.front().first < tau)
    snapshots_.pop_front();

  used_index_by_round_.push_back(std::max(tau, 0L));
  const ExtremePoint& zp = vertex_for(std::max(tau, 0L));

  // Counter update for the vertex used this round, skipping rounds included.
  for (auto [i, j] : zp.support) {
    const int l = tp_group_index(zp.at(i, j));
    auto& v = state_.tp_counters[i * state_.m + j];
    if (static_cast<int>(v.size()) < l) v.resize(l, 0);
    ++v[l - 1];
  }

  advance_compq(t);
  cache_.evict_below(std::max(tau, 0L));

  RoundOutcome out;
  out.context = context;

  const double f = inst_.context_prob(context);
  assert(f > 0.0 && "sampled context must have positive probability");

  const double u = coins_.uniform(Purpose::PolicyUcb, t, 0);
  int sampled = kNoArm;
  double acc = 0.0;
  for (int i = 0; i < inst_.num_arms(); ++i) {
    acc += zp.at(i, context) / f;
    if (u < acc) {
      sampled = i;
      break;
    }
  }
  out.sampled_arm = sampled;

  if (sampled == kNoArm) {
    out.event = RoundEvent::LpSkip;
  } else if (!blocks.available(sampled)) {
    out.event = RoundEvent::Block;
  } else {
    const double q = compq(sampled, t);
    const double beta = std::min(1.0, play_cap_[sampled] / q);
    if (beta * q > play_cap_[sampled] + 1e-12)
      throw std::logic_error("non-skipping probability exceeds the play cap");
    const double v = coins_.uniform(Purpose::PolicyUcb, t, 1);
    if (v <= beta) {
      out.event = RoundEvent::Play;
      out.action = sampled;
    } else {
      out.event = RoundEvent::Skip;
    }
  }

  if (opts_.keep_trace)
    trace_.push_back({t, m_t, context, sampled, out.event, 0.0, zp.value});
  return out;
}

void UcbCbbPolicy::observe(long t, int arm, int ctx, double reward) {
  const std::size_t p = static_cast<std::size_t>(arm) * state_.m + ctx;
  ++state_.pulls[p];
  state_.reward_sum[p] += reward;
  play_rounds_[arm].push_back(t);
  if (opts_.keep_trace && !trace_.empty() && trace_.back().t == t)
    trace_.back().reward = reward;
}

void UcbCbbPolicy::write_trace_csv(const std::string& path,
                                   const std::vector<UcbTraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,M_t,context,sampled_arm,event,reward,lp_value_used\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%ld,%ld,%d,%d,%s,%.12g,%.12g\n", r.t, r.m_t,
                  r.context, r.sampled_arm, to_string(r.event), r.reward,
                  r.lp_value_used);
    out << line;
  }
}

}  // namespace cbb
