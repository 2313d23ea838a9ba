#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cbb/environment.hpp"
#include "cbb/instance.hpp"
#include "cbb/lp.hpp"
#include "cbb/random.hpp"

namespace cbb {

// A compq evaluation asked for an extreme point or cached value outside the
// recorded history. Signals a harness bug, not a recoverable condition.
struct HistoryGapError : std::logic_error {
  using std::logic_error::logic_error;
};

// min{1, mu_hat + sqrt(3 ln t / (2 pulls))}; 1 when pulls = 0.
double ucb_index(double emp_mean, long long pulls, double t);

// floor(2 log_c1 t) + 2 d_max + 8 with c1 = e^2/(e^2-1).
long delay_m_raw(long t, int d_max);

// The raw value clamped to t when t <= raw, so t - M_t is never negative.
long delay_m(long t, int d_max);

// Smallest t with t - delay_m_raw(t) >= 1, by forward scan.
long critical_time(int d_max);

// Mutable learning state: play counts, reward sums, and the per-group
// usage counters N_{i,j,l}.
struct UcbState {
  int k = 0;
  int m = 0;
  std::vector<long long> pulls;      // k*m row-major
  std::vector<double> reward_sum;    // k*m row-major
  std::vector<std::vector<std::uint64_t>> tp_counters;  // per pair, by l-1

  void init(int k_arms, int m_contexts);
  double emp_mean(int i, int j) const;
  double index(int i, int j, double t) const;
  LpObjective index_objective(double t) const;
  std::uint64_t tp_count(int i, int j, int l) const;
};

// Append-once record of the extreme points actually computed: entry tau
// is the solution of the LP under the indices frozen at round tau
// (all-ones for tau = 0). Rewriting an entry throws.
class ExtremePointLog {
 public:
  bool contains(long tau) const { return by_tau_.count(tau) > 0; }
  const ExtremePoint& at(long tau) const;
  void append(long tau, ExtremePoint zp);
  std::size_t size() const { return by_tau_.size(); }

 private:
  std::unordered_map<long, ExtremePoint> by_tau_;
};

// Memo of conditional availability values q_{i,t}(H_{t-M_t}), keyed
// (arm, t) and kept contiguous per arm. Entries below t - M_t are evicted
// each round; reads outside the window throw HistoryGapError.
class CompQCache {
 public:
  void init(int k_arms);
  bool has(int arm, long t) const;
  double get(int arm, long t) const;
  void push(int arm, long t, double v);  // t must extend the arm's window
  long end(int arm) const;               // last cached round, 0 if none
  void evict_below(long floor);

 private:
  struct ArmWindow {
    long base = 1;  // round of q.front()
    std::deque<double> q;
  };
  std::vector<ArmWindow> arms_;
};

struct UcbTraceRow {
  long t = 0;
  long m_t = 0;
  int context = -1;
  int sampled_arm = kNoArm;
  RoundEvent event = RoundEvent::LpSkip;
  double reward = 0.0;
  double lp_value_used = 0.0;
};

struct UcbCbbOptions {
  bool track_diagnostics = false;  // counter/sample ratio logging
  bool keep_trace = false;
};

// Bandit policy: per-round LP under UCB indices lagged by M_t, marginal
// sampling, and conditional non-skipping probabilities from compq.
class UcbCbbPolicy {
 public:
  UcbCbbPolicy(const Instance& inst, RandomStream coins, UcbCbbOptions opts = {});

  // Rounds must be stepped in order t = 1, 2, ...
  RoundOutcome decide(long t, int context, const BlockState& blocks);
  void observe(long t, int arm, int ctx, double reward);

  // P[arm available at t given the lag-M_t history], via the cached recursion.
  double compq(int arm, long t);

  const UcbState& state() const { return state_; }
  const ExtremePointLog& log() const { return log_; }
  long critical_round() const { return t_c_; }
  long used_index(long t) const { return used_index_by_round_.at(t); }
  double play_cap(int arm) const { return play_cap_[arm]; }

  // Cumulative count of rounds where some (i,j,l) had a large counter but
  // too few samples (the subsampling red-flag condition).
  long long diag_bad_events() const { return diag_bad_events_; }

  const std::vector<UcbTraceRow>& trace() const { return trace_; }
  static void write_trace_csv(const std::string& path,
                              const std::vector<UcbTraceRow>& rows);

 private:
  struct Snapshot {
    std::vector<long long> pulls;
    std::vector<double> reward_sum;
  };

  const ExtremePoint& vertex_for(long tau);
  double compq_fresh(int arm, long t) const;
  void advance_compq(long t);
  long first_sure_available(int arm, long tau0) const;
  void run_diagnostics(long t);

  const Instance& inst_;
  RandomStream coins_;
  UcbCbbOptions opts_;
  UcbState state_;
  ExtremePointLog log_;
  CompQCache cache_;
  std::vector<double> play_cap_;  // d_i/(2d_i - 1)
  long t_c_ = 0;
  long last_t_ = 0;
  long prev_m_ = 0;
  long prev_tau_ = 0;
  std::deque<std::pair<long, Snapshot>> snapshots_;
  std::vector<long> used_index_by_round_;      // [t], index 0 unused
  std::vector<std::vector<long>> play_rounds_;  // per arm, ascending
  long long diag_bad_events_ = 0;
  std::vector<UcbTraceRow> trace_;
};

}  // namespace cbb
