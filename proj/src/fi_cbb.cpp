#include "cbb/fi_cbb.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cbb {

namespace {
constexpr long kBlock = 1024;  // lazy extension granularity
constexpr double kQFloor = 1e-15;
}  // namespace

AvailabilitySchedule::AvailabilitySchedule(const Instance& inst,
                                           const ExtremePoint& zstar) {
  const int k = inst.num_arms();
  delays_ = inst.delays();
  zrow_.resize(k);
  play_cap_.resize(k);
  q_.resize(k);
  beta_.resize(k);
  for (int i = 0; i < k; ++i) {
    zrow_[i] = zstar.row_sum(i);
    play_cap_[i] = static_cast<double>(delays_[i]) / (2.0 * delays_[i] - 1.0);
  }
}

void AvailabilitySchedule::extend(long t) {
  if (t <= built_) return;
  const long target = ((t + kBlock - 1) / kBlock) * kBlock;
  const int k = static_cast<int>(delays_.size());
  for (int i = 0; i < k; ++i) {
    auto& q = q_[i];
    auto& beta = beta_[i];
    q.reserve(target);
    beta.reserve(target);
    if (delays_[i] == 1) {
      // unit-delay arms are always available and never skipped
      q.resize(target, 1.0);
      beta.resize(target, 1.0);
      continue;
    }
    const int d = delays_[i];
    const double s = zrow_[i];
    if (q.empty()) {
      q.push_back(1.0);
      beta.push_back(play_cap_[i]);  // min{1, cap/1}, cap < 1 for d >= 2
    }
    while (static_cast<long>(q.size()) < target) {
      const long tt = static_cast<long>(q.size());  // computing q at round tt+1
      double next = q[tt - 1] * (1.0 - beta[tt - 1] * s);
      if (tt >= d) next += q[tt - d] * beta[tt - d] * s;
      next = std::clamp(next, kQFloor, 1.0);
      q.push_back(next);
      beta.push_back(std::min(1.0, play_cap_[i] / next));
    }
  }
  built_ = target;
}

double AvailabilitySchedule::q(int arm, long t) {
  assert(t >= 1);
  if (t > built_) extend(t);
  return q_[arm][t - 1];
}

double AvailabilitySchedule::beta(int arm, long t) {
  assert(t >= 1);
  if (t > built_) extend(t);
  return beta_[arm][t - 1];
}

void AvailabilitySchedule::dump_csv(const std::string& path, long horizon) {
  extend(horizon);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,arm,q,beta\n";
  char line[128];
  for (long t = 1; t <= horizon; ++t)
    for (std::size_t i = 0; i < delays_.size(); ++i) {
      std::snprintf(line, sizeof(line), "%ld,%zu,%.12g,%.12g\n", t, i,
                    q_[i][t - 1], beta_[i][t - 1]);
      out << line;
    }
}

FiCbbPolicy::FiCbbPolicy(const Instance& inst, ExtremePoint zstar,
                         RandomStream coins)
    : inst_(inst),
      zstar_(std::move(zstar)),
      schedule_(inst, zstar_),
      coins_(coins) {}

RoundOutcome FiCbbPolicy::decide(long t, int context, const BlockState& blocks) {
  RoundOutcome out;
  out.context = context;

  const double f = inst_.context_prob(context);
  assert(f > 0.0 && "sampled context must have positive probability");

  const double u = coins_.uniform(Purpose::PolicyFi, t, 0);
  int sampled = kNoArm;
  double acc = 0.0;
  for (int i = 0; i < inst_.num_arms(); ++i) {
    acc += zstar_.at(i, context) / f;
    if (u < acc) {
      sampled = i;
      break;
    }
  }
  out.sampled_arm = sampled;

  if (sampled == kNoArm) {
    out.event = RoundEvent::LpSkip;
    return out;
  }
  if (!blocks.available(sampled)) {
    out.event = RoundEvent::Block;
    return out;
  }
  const double v = coins_.uniform(Purpose::PolicyFi, t, 1);
  if (v <= schedule_.beta(sampled, t)) {
    out.event = RoundEvent::Play;
    out.action = sampled;
  } else {
    out.event = RoundEvent::Skip;
  }
  return out;
}

}  // namespace cbb
