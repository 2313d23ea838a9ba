#pragma once

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cbb/instance.hpp"

namespace cbb {

struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Objective weights of the rate LP: the true means, the all-ones start, or
// a round's UCB indices.
struct LpObjective {
  int k = 0;
  int m = 0;
  std::vector<double> w;  // row-major

  double at(int i, int j) const { return w[i * m + j]; }

  static LpObjective from_means(const Instance& inst);
  static LpObjective ones(int k, int m);
};

// A basic optimal solution of the rate LP: rates z_{i,j} >= 0 with
// sum_j z_{i,j} <= 1/d_i per arm and sum_i z_{i,j} <= f_j per context.
// Vertices have at most k+m nonzero coordinates.
struct ExtremePoint {
  int k = 0;
  int m = 0;
  std::vector<double> z;  // row-major
  double value = 0.0;     // objective under the weights used to solve
  std::vector<std::pair<int, int>> support;  // pairs with z_{i,j} > 0
  std::vector<double> row_sums;              // per-arm sum_j z_{i,j}

  double at(int i, int j) const { return z[i * m + j]; }
  double row_sum(int i) const { return row_sums[i]; }
  double value_under(const LpObjective& obj) const;

  // Recomputes value/support/row_sums from z, snapping |z| < 1e-12 to zero.
  void finalize(const LpObjective& obj);

  nlohmann::json to_json() const;
};

// Solves the LP to an optimal extreme point via the max-weight-flow
// network (source->arm caps 1/d_i, context->sink caps f_j, arm->context
// weights from the objective). Deterministic: fixed relaxation order and a
// post pass that pivots any free cycle down to a vertex.
ExtremePoint solve_lp(const Instance& inst, const LpObjective& obj);

// Same optimum value, but ties between optimal vertices resolve under a
// cyclically shifted arm/context labeling. Rotation 0 is the canonical
// solve; the bandit policy varies the rotation per round so that tied
// vertices (all-ones indices early on) do not starve unexplored pairs.
ExtremePoint solve_lp_rotated(const Instance& inst, const LpObjective& obj,
                              long rotation);

// Every vertex of the feasibility polytope, found by enumerating tight
// subsets of {(C1),(C2), z>=0}. Guarded to k*m <= 12.
std::vector<ExtremePoint> enumerate_extreme_points(const Instance& inst);

// Suboptimality gaps of the vertex family under the true means.
struct GapReport {
  std::vector<ExtremePoint> vertices;   // enumeration order
  std::vector<double> delta_by_vertex;  // Delta_Z per vertex
  double delta_max = 0.0;
  std::vector<double> delta_min;  // k*m row-major; +inf where no suboptimal
                                  // vertex has z_{i,j} > 0
  double optimal_value = 0.0;

  double delta_min_at(int i, int j, int m) const { return delta_min[i * m + j]; }
};

GapReport compute_gaps(const Instance& inst);

// Group index l >= 1 with 2^-l < z <= 2^-(l-1). Strict at the lower
// boundary, so z = 2^-l lands in group l+1.
int tp_group_index(double z_value);

}  // namespace cbb
