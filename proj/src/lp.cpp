#include "cbb/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>

namespace cbb {

namespace {

constexpr double kSnapTol = 1e-12;   // coordinates below this are zero
constexpr double kFeasTol = 1e-9;    // constraint slack tolerance
constexpr double kPathTol = 1e-12;   // minimum augmenting-path weight

}  // namespace

LpObjective LpObjective::from_means(const Instance& inst) {
  LpObjective obj;
  obj.k = inst.num_arms();
  obj.m = inst.num_contexts();
  obj.w = inst.means_row_major();
  return obj;
}

LpObjective LpObjective::ones(int k, int m) {
  LpObjective obj;
  obj.k = k;
  obj.m = m;
  obj.w.assign(static_cast<std::size_t>(k) * m, 1.0);
  return obj;
}

double ExtremePoint::value_under(const LpObjective& obj) const {
  double v = 0.0;
  for (std::size_t p = 0; p < z.size(); ++p) v += obj.w[p] * z[p];
  return v;
}

void ExtremePoint::finalize(const LpObjective& obj) {
  support.clear();
  row_sums.assign(k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) {
      double& v = z[i * m + j];
      if (std::abs(v) < kSnapTol) v = 0.0;
      if (v > 0.0) support.emplace_back(i, j);
      row_sums[i] += v;
    }
  value = value_under(obj);
}

nlohmann::json ExtremePoint::to_json() const {
  nlohmann::json zj = nlohmann::json::array();
  for (int i = 0; i < k; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m; ++j) row.push_back(at(i, j));
    zj.push_back(row);
  }
  nlohmann::json sj = nlohmann::json::array();
  for (auto [i, j] : support) sj.push_back(nlohmann::json::array({i, j}));
  return nlohmann::json{{"z", zj}, {"value", value}, {"support", sj}};
}

namespace {

// Working state of the flow network. Node layout for path search:
// 0 = source, 1..k = arms, k+1..k+m = contexts, k+m+1 = sink.
struct FlowState {
  int k, m;
  std::vector<double> z;    // k*m
  std::vector<double> row;  // per arm
  std::vector<double> col;  // per context
  std::vector<double> cap;  // 1/d_i
  std::vector<double> f;    // f_j

  void recompute_sums() {
    std::fill(row.begin(), row.end(), 0.0);
    std::fill(col.begin(), col.end(), 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) {
        if (std::abs(z[i * m + j]) < 1e-15) z[i * m + j] = 0.0;
        row[i] += z[i * m + j];
        col[j] += z[i * m + j];
      }
  }
};

struct Arc {
  int from, to;
  double weight;
  double residual;
  int pair;  // z index for arm<->context arcs, -1 otherwise
  int dir;   // +1 increases z/col, -1 decreases
};

// Longest-path labels via Bellman-Ford over the residual arcs. The flow is
// optimal for its value at every step, so there are no positive cycles and
// the relaxation converges within V passes.
bool best_augmenting_path(const FlowState& st, const LpObjective& obj,
                          std::vector<Arc>& arcs_out, double* path_weight) {
  const int k = st.k, m = st.m;
  const int source = 0, sink = k + m + 1, nodes = k + m + 2;

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(k) * m * 2 + 2 * (k + m));
  for (int i = 0; i < k; ++i)
    if (st.cap[i] - st.row[i] > kPathTol)
      arcs.push_back({source, 1 + i, 0.0, st.cap[i] - st.row[i], -1, 0});
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j)
      arcs.push_back({1 + i, 1 + k + j, obj.at(i, j),
                      std::numeric_limits<double>::infinity(), i * m + j, +1});
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i)
      if (st.z[i * m + j] > kPathTol)
        arcs.push_back({1 + k + j, 1 + i, -obj.at(i, j), st.z[i * m + j],
                        i * m + j, -1});
  for (int j = 0; j < m; ++j)
    if (st.f[j] - st.col[j] > kPathTol)
      arcs.push_back({1 + k + j, sink, 0.0, st.f[j] - st.col[j], -1, 0});
  for (int j = 0; j < m; ++j)
    if (st.col[j] > kPathTol)
      arcs.push_back({sink, 1 + k + j, 0.0, st.col[j], -1, 0});

  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes, neg_inf);
  std::vector<int> parent(nodes, -1);
  std::vector<int> hops(nodes, 0);
  dist[source] = 0.0;

  // A strict improvement threshold blocks the one-ulp creep that rounding
  // produces around zero-weight forward/reverse arc pairs; ties within the
  // threshold break toward fewer hops, keeping the parent graph acyclic.
  constexpr double kImproveTol = 1e-13;
  for (int pass = 0; pass < 2 * nodes + 6; ++pass) {
    bool any = false;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const Arc& arc = arcs[a];
      if (dist[arc.from] == neg_inf) continue;
      const double cand = dist[arc.from] + arc.weight;
      const int cand_hops = hops[arc.from] + 1;
      if (cand > dist[arc.to] + kImproveTol) {
        dist[arc.to] = cand;
        hops[arc.to] = cand_hops;
        parent[arc.to] = static_cast<int>(a);
        any = true;
      } else if (cand == dist[arc.to] && cand_hops < hops[arc.to]) {
        hops[arc.to] = cand_hops;
        parent[arc.to] = static_cast<int>(a);
        any = true;
      }
    }
    if (!any) break;
  }
  for (const Arc& arc : arcs)
    if (dist[arc.from] != neg_inf &&
        dist[arc.from] + arc.weight > dist[arc.to] + kImproveTol)
      throw std::logic_error("lp solver: positive cycle in residual network");
  if (dist[sink] == neg_inf || dist[sink] <= kPathTol) return false;

  arcs_out.clear();
  int steps = 0;
  for (int v = sink; v != source;) {
    if (++steps > nodes + 2)
      throw std::logic_error("lp solver: parent chain is not a simple path");
    const Arc& arc = arcs[parent[v]];
    arcs_out.push_back(arc);
    v = arc.from;
  }
  std::reverse(arcs_out.begin(), arcs_out.end());
  *path_weight = dist[sink];
  return true;
}

// Free-edge graph used for the vertex test: arms, contexts and one slack
// node; an optimal flow is a vertex iff this graph is a forest.
struct FreeGraph {
  // edge: (u, v, pair-index or -1 for slack edges)
  struct Edge {
    int u, v, pair;
  };
  int nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj;  // edge ids per node
};

FreeGraph build_free_graph(const FlowState& st) {
  const int k = st.k, m = st.m;
  FreeGraph g;
  g.nodes = k + m + 1;
  const int bottom = k + m;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j)
      if (st.z[i * m + j] > kSnapTol) g.edges.push_back({i, k + j, i * m + j});
  for (int i = 0; i < k; ++i)
    if (st.cap[i] - st.row[i] > kFeasTol) g.edges.push_back({i, bottom, -1});
  for (int j = 0; j < m; ++j)
    if (st.f[j] - st.col[j] > kFeasTol) g.edges.push_back({k + j, bottom, -1});
  g.adj.assign(g.nodes, {});
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    g.adj[g.edges[e].u].push_back(static_cast<int>(e));
    g.adj[g.edges[e].v].push_back(static_cast<int>(e));
  }
  return g;
}

// Returns a cycle as a node sequence (closed, first == last), or empty.
std::vector<int> find_cycle(const FreeGraph& g) {
  std::vector<int> state(g.nodes, 0);  // 0 unseen, 1 on stack, 2 done
  std::vector<int> via_edge(g.nodes, -1);
  std::vector<int> parent(g.nodes, -1);
  for (int root = 0; root < g.nodes; ++root) {
    if (state[root] != 0) continue;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next >= g.adj[u].size()) {
        state[u] = 2;
        stack.pop_back();
        continue;
      }
      const int eid = g.adj[u][next++];
      if (eid == via_edge[u]) continue;
      const auto& e = g.edges[eid];
      const int v = (e.u == u) ? e.v : e.u;
      if (state[v] == 1) {
        // back edge: cycle is v -> ... -> u -> v along parent pointers
        std::vector<int> cycle{u};
        for (int w = u; w != v;) {
          w = parent[w];
          cycle.push_back(w);
        }
        std::reverse(cycle.begin(), cycle.end());  // v ... u
        cycle.push_back(v);                        // closed
        return cycle;
      }
      if (state[v] == 0) {
        state[v] = 1;
        parent[v] = u;
        via_edge[v] = eid;
        stack.emplace_back(v, 0);
      }
    }
  }
  return {};
}

// Pivot the flow around a free cycle until some edge leaves the free set.
// Keeps feasibility and (at an optimum) the objective value.
void cancel_cycle(FlowState& st, const LpObjective& obj, const std::vector<int>& cycle) {
  const int k = st.k, m = st.m;
  const int bottom = k + m;
  struct Step {
    int pair;  // -1 for slack edges
    int sign;  // +1: z increases along orientation
    int arm = -1, ctx = -1;
  };
  std::vector<Step> steps;
  for (std::size_t s = 0; s + 1 < cycle.size(); ++s) {
    const int a = cycle[s], b = cycle[s + 1];
    Step st_edge;
    if (a < k && b >= k && b < bottom) {
      st_edge = {a * m + (b - k), +1, a, b - k};
    } else if (a >= k && a < bottom && b < k) {
      st_edge = {b * m + (a - k), -1, b, a - k};
    } else {
      st_edge.pair = -1;  // slack edge via bottom
    }
    steps.push_back(st_edge);
  }

  // Net row/col change at the nodes adjacent to the slack node.
  std::vector<double> row_delta(k, 0.0), col_delta(m, 0.0);
  for (const Step& s : steps) {
    if (s.pair < 0) continue;
    row_delta[s.arm] += s.sign;
    col_delta[s.ctx] += s.sign;
  }

  // Deterministic orientation: the smallest z-edge of the cycle drains.
  int min_pair = -1, min_sign = 0;
  for (const Step& s : steps)
    if (s.pair >= 0 && (min_pair < 0 || s.pair < min_pair)) {
      min_pair = s.pair;
      min_sign = s.sign;
    }
  assert(min_pair >= 0);
  const int flip = (min_sign > 0) ? -1 : +1;

  double obj_delta = 0.0;
  for (const Step& s : steps)
    if (s.pair >= 0) obj_delta += flip * s.sign * obj.w[s.pair];
  if (obj_delta > 1e-6)
    throw std::logic_error("lp solver: improving cycle at claimed optimum");

  double theta = std::numeric_limits<double>::infinity();
  for (const Step& s : steps)
    if (s.pair >= 0 && flip * s.sign < 0) theta = std::min(theta, st.z[s.pair]);
  for (int i = 0; i < k; ++i)
    if (flip * row_delta[i] > 0.5) theta = std::min(theta, st.cap[i] - st.row[i]);
  for (int j = 0; j < m; ++j)
    if (flip * col_delta[j] > 0.5) theta = std::min(theta, st.f[j] - st.col[j]);
  assert(theta > 0.0 && std::isfinite(theta));

  for (const Step& s : steps)
    if (s.pair >= 0) st.z[s.pair] += flip * s.sign * theta;
  st.recompute_sums();
}

}  // namespace

ExtremePoint solve_lp(const Instance& inst, const LpObjective& obj) {
  const int k = inst.num_arms(), m = inst.num_contexts();
  if (obj.k != k || obj.m != m) throw DomainError("objective shape mismatch");
  for (double w : obj.w)
    if (!std::isfinite(w)) throw DomainError("objective weight not finite");

  FlowState st;
  st.k = k;
  st.m = m;
  st.z.assign(static_cast<std::size_t>(k) * m, 0.0);
  st.row.assign(k, 0.0);
  st.col.assign(m, 0.0);
  st.cap.resize(k);
  st.f.resize(m);
  for (int i = 0; i < k; ++i) st.cap[i] = 1.0 / inst.delay(i);
  for (int j = 0; j < m; ++j) st.f[j] = inst.context_prob(j);

  std::vector<Arc> path;
  double weight = 0.0;
  const int max_augment = 16 * (k + 1) * (m + 1) + 64;
  int rounds = 0;
  while (best_augmenting_path(st, obj, path, &weight)) {
    if (++rounds > max_augment)
      throw std::logic_error("lp solver: augmentation did not terminate");
    double theta = std::numeric_limits<double>::infinity();
    for (const Arc& arc : path) theta = std::min(theta, arc.residual);
    assert(theta > 0.0 && std::isfinite(theta));
    for (const Arc& arc : path)
      if (arc.pair >= 0) st.z[arc.pair] += arc.dir * theta;
    st.recompute_sums();
  }

  // The augmenting-path optimum can sit in the interior of an optimal face
  // when objectives tie; pivot any remaining free cycles down to a vertex.
  int guard = static_cast<int>(st.z.size()) + k + m + 4;
  while (true) {
    FreeGraph g = build_free_graph(st);
    std::vector<int> cycle = find_cycle(g);
    if (cycle.empty()) break;
    if (--guard < 0) throw std::logic_error("lp solver: cycle canceling did not terminate");
    cancel_cycle(st, obj, cycle);
  }

  ExtremePoint out;
  out.k = k;
  out.m = m;
  out.z = st.z;
  for (double& v : out.z)
    if (v < 0.0) v = 0.0;
  out.finalize(obj);
  return out;
}

ExtremePoint solve_lp_rotated(const Instance& inst, const LpObjective& obj,
                              long rotation) {
  const int k = inst.num_arms(), m = inst.num_contexts();
  const int ra = static_cast<int>(rotation % k);
  const int rc = static_cast<int>((rotation / k) % m);
  if (ra == 0 && rc == 0) return solve_lp(inst, obj);

  // Relabel arm i -> (i + ra) % k and context j -> (j + rc) % m, solve the
  // relabeled program, and map the vertex back.
  std::vector<int> delays(k);
  std::vector<double> probs(m);
  for (int i = 0; i < k; ++i) delays[(i + ra) % k] = inst.delay(i);
  for (int j = 0; j < m; ++j) probs[(j + rc) % m] = inst.context_prob(j);
  const Instance permuted = Instance::validate(
      std::move(delays), std::move(probs),
      std::vector<double>(static_cast<std::size_t>(k) * m, 0.0));
  LpObjective pobj;
  pobj.k = k;
  pobj.m = m;
  pobj.w.resize(obj.w.size());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j)
      pobj.w[((i + ra) % k) * m + (j + rc) % m] = obj.at(i, j);
  const ExtremePoint psol = solve_lp(permuted, pobj);

  ExtremePoint out;
  out.k = k;
  out.m = m;
  out.z.resize(psol.z.size());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j)
      out.z[i * m + j] = psol.at((i + ra) % k, (j + rc) % m);
  out.finalize(obj);
  return out;
}

namespace {

// Gaussian elimination with partial pivoting; false when singular.
bool solve_square(std::vector<double> a, std::vector<double> b, int n,
                  std::vector<double>* x) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-10) return false;
    if (piv != c) {
      for (int cc = 0; cc < n; ++cc) std::swap(a[c * n + cc], a[piv * n + cc]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double factor = a[r * n + c] / a[c * n + c];
      if (factor == 0.0) continue;
      for (int cc = c; cc < n; ++cc) a[r * n + cc] -= factor * a[c * n + cc];
      b[r] -= factor * b[c];
    }
  }
  x->assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int cc = r + 1; cc < n; ++cc) acc -= a[r * n + cc] * (*x)[cc];
    (*x)[r] = acc / a[r * n + r];
  }
  return true;
}

}  // namespace

std::vector<ExtremePoint> enumerate_extreme_points(const Instance& inst) {
  const int k = inst.num_arms(), m = inst.num_contexts();
  const int n = k * m;
  if (n > 12)
    throw TooLargeError("vertex enumeration limited to k*m <= 12, got " +
                        std::to_string(n));

  // Constraint system a.z <= b over the n rates.
  struct Row {
    std::vector<double> a;
    double b;
  };
  std::vector<Row> rows;
  for (int i = 0; i < k; ++i) {
    Row r{std::vector<double>(n, 0.0), 1.0 / inst.delay(i)};
    for (int j = 0; j < m; ++j) r.a[i * m + j] = 1.0;
    rows.push_back(std::move(r));
  }
  for (int j = 0; j < m; ++j) {
    Row r{std::vector<double>(n, 0.0), inst.context_prob(j)};
    for (int i = 0; i < k; ++i) r.a[i * m + j] = 1.0;
    rows.push_back(std::move(r));
  }
  for (int p = 0; p < n; ++p) {
    Row r{std::vector<double>(n, 0.0), 0.0};
    r.a[p] = -1.0;
    rows.push_back(std::move(r));
  }
  const int total = static_cast<int>(rows.size());

  const LpObjective mean_obj = LpObjective::from_means(inst);
  std::vector<ExtremePoint> verts;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;

  auto next_combination = [&]() {
    int i = n - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) return false;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
    return true;
  };

  std::vector<double> a(static_cast<std::size_t>(n) * n), b(n), x;
  do {
    for (int r = 0; r < n; ++r) {
      std::memcpy(&a[static_cast<std::size_t>(r) * n], rows[pick[r]].a.data(),
                  sizeof(double) * n);
      b[r] = rows[pick[r]].b;
    }
    if (!solve_square(a, b, n, &x)) continue;

    bool feasible = true;
    for (const Row& r : rows) {
      double lhs = 0.0;
      for (int p = 0; p < n; ++p) lhs += r.a[p] * x[p];
      if (lhs > r.b + kFeasTol) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;

    for (double& v : x)
      if (std::abs(v) < kSnapTol || v < 0.0) v = 0.0;

    bool dup = false;
    for (const ExtremePoint& v : verts) {
      bool same = true;
      for (int p = 0; p < n; ++p)
        if (std::abs(v.z[p] - x[p]) > 1e-9) {
          same = false;
          break;
        }
      if (same) {
        dup = true;
        break;
      }
    }
    if (dup) continue;

    ExtremePoint ep;
    ep.k = k;
    ep.m = m;
    ep.z = x;
    ep.finalize(mean_obj);
    verts.push_back(std::move(ep));
  } while (next_combination());

  return verts;
}

GapReport compute_gaps(const Instance& inst) {
  GapReport report;
  report.vertices = enumerate_extreme_points(inst);
  const int k = inst.num_arms(), m = inst.num_contexts();

  double best = 0.0;
  for (const ExtremePoint& v : report.vertices) best = std::max(best, v.value);
  report.optimal_value = best;

  report.delta_by_vertex.reserve(report.vertices.size());
  report.delta_max = 0.0;
  report.delta_min.assign(static_cast<std::size_t>(k) * m,
                          std::numeric_limits<double>::infinity());
  for (const ExtremePoint& v : report.vertices) {
    const double delta = best - v.value;
    report.delta_by_vertex.push_back(delta);
    report.delta_max = std::max(report.delta_max, delta);
    if (delta > kFeasTol) {  // suboptimal vertices only
      for (auto [i, j] : v.support)
        report.delta_min[i * m + j] = std::min(report.delta_min[i * m + j], delta);
    }
  }
  return report;
}

int tp_group_index(double z_value) {
  if (!(z_value > 0.0) || z_value > 1.0)
    throw DomainError("tp_group_index requires z in (0, 1]");
  for (int l = 1; l <= 1100; ++l) {
    if (std::ldexp(1.0, -l) < z_value && z_value <= std::ldexp(1.0, -l + 1)) return l;
  }
  throw DomainError("tp_group_index: no group found");
}

}  // namespace cbb
