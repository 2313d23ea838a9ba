#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cbb/instance.hpp"
#include "cbb/lp.hpp"
#include "cbb/random.hpp"

using namespace cbb;

namespace {

Instance random_instance(std::uint64_t seed, int k, int m, int max_d) {
  RandomStream rng(seed);
  std::vector<int> delays(k);
  for (int i = 0; i < k; ++i)
    delays[i] = 1 + static_cast<int>(rng.uniform(Purpose::Generic, 1, i) * max_d);
  std::vector<double> probs(m);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    probs[j] = 0.1 + rng.uniform(Purpose::Generic, 2, j);
    total += probs[j];
  }
  for (double& p : probs) p /= total;
  std::vector<double> means(static_cast<std::size_t>(k) * m);
  for (std::size_t p = 0; p < means.size(); ++p)
    means[p] = rng.uniform(Purpose::Generic, 3, p);
  return Instance::validate(std::move(delays), std::move(probs), std::move(means));
}

bool feasible(const Instance& inst, const ExtremePoint& v) {
  for (int i = 0; i < inst.num_arms(); ++i) {
    double row = 0.0;
    for (int j = 0; j < inst.num_contexts(); ++j) {
      if (v.at(i, j) < -1e-12) return false;
      row += v.at(i, j);
    }
    if (row > 1.0 / inst.delay(i) + 1e-9) return false;
  }
  for (int j = 0; j < inst.num_contexts(); ++j) {
    double col = 0.0;
    for (int i = 0; i < inst.num_arms(); ++i) col += v.at(i, j);
    if (col > inst.context_prob(j) + 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("lp_core") {
  TEST_CASE("trivial 1x1 saturates both caps") {
    const Instance inst = Instance::validate({1}, {1.0}, {0.5});
    const ExtremePoint z = solve_lp(inst, LpObjective::from_means(inst));
    CHECK(z.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(z.support.size() == 1);
  }

  TEST_CASE("gap instance optimum is the perfect matching") {
    const Instance inst = gap_instance(3, 0.9);
    const ExtremePoint z = solve_lp(inst, LpObjective::from_means(inst));
    CHECK(z.value == doctest::Approx(0.9).epsilon(1e-9));
    REQUIRE(z.support.size() == 3);
    for (auto [i, j] : z.support) {
      CHECK(i == j);
      CHECK(z.at(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-9));
    }
  }

  TEST_CASE("solver matches brute-force vertex enumeration") {
    // includes the canonical seed-7 2x2 case
    for (std::uint64_t seed : {7ull, 11ull, 23ull, 105ull, 900ull}) {
      const Instance inst = random_instance(seed, 2, 2, 3);
      const LpObjective obj = LpObjective::from_means(inst);
      const auto verts = enumerate_extreme_points(inst);
      double best = 0.0;
      for (const auto& v : verts) best = std::max(best, v.value_under(obj));
      const ExtremePoint sol = solve_lp(inst, obj);
      CHECK(std::abs(sol.value - best) <= 1e-9);
      CHECK(feasible(inst, sol));
      // solved point must coincide with one enumerated vertex
      bool matched = false;
      for (const auto& v : verts) {
        bool same = true;
        for (std::size_t p = 0; p < v.z.size(); ++p)
          if (std::abs(v.z[p] - sol.z[p]) > 1e-8) same = false;
        matched |= same;
      }
      CHECK(matched);
    }
  }

  TEST_CASE("solver value dominates every enumerated vertex") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const Instance inst = random_instance(seed, 3, 3, 4);
      const LpObjective obj = LpObjective::from_means(inst);
      const double val = solve_lp(inst, obj).value;
      for (const auto& v : enumerate_extreme_points(inst))
        CHECK(val >= v.value_under(obj) - 1e-9);
    }
  }

  TEST_CASE("enumeration of the 1-dimensional polytope") {
    // cap is min(1/2, f) so the vertex set is {0, f} or {0, 1/2}
    const auto tight_f = enumerate_extreme_points(
        Instance::validate({2}, {0.3, 0.7}, {1.0, 0.0}));
    // two free coordinates: vertices are products of {0,0.3} x {0,0.2}
    // restricted by the row cap 1/2; at minimum the 1-d slice holds
    bool saw_zero = false, saw_03 = false;
    for (const auto& v : tight_f) {
      if (std::abs(v.z[0]) <= 1e-9 && std::abs(v.z[1]) <= 1e-9) saw_zero = true;
      if (std::abs(v.z[0] - 0.3) <= 1e-9 && std::abs(v.z[1]) <= 1e-9) saw_03 = true;
    }
    CHECK(saw_zero);
    CHECK(saw_03);

    const auto tight_d = enumerate_extreme_points(
        Instance::validate({2}, {1.0}, {1.0}));
    REQUIRE(tight_d.size() == 2);  // z = 0 and z = 1/2
    std::vector<double> coords = {tight_d[0].z[0], tight_d[1].z[0]};
    std::sort(coords.begin(), coords.end());
    CHECK(coords[0] == doctest::Approx(0.0));
    CHECK(coords[1] == doctest::Approx(0.5));
  }

  TEST_CASE("gap_instance(2, 0.5) vertices live on {0, 1/2}") {
    for (const auto& v : enumerate_extreme_points(gap_instance(2, 0.5)))
      for (double z : v.z)
        CHECK((std::abs(z) <= 1e-9 || std::abs(z - 0.5) <= 1e-9));
  }

  TEST_CASE("gap_instance optimum equals delta") {
    for (auto [k, delta] : {std::pair{2, 0.5}, {3, 0.9}, {4, 1.0}, {5, 0.2}}) {
      const Instance inst = gap_instance(k, delta);
      CHECK(solve_lp(inst, LpObjective::from_means(inst)).value ==
            doctest::Approx(delta).epsilon(1e-9));
    }
  }

  TEST_CASE("rotated solve returns an optimal vertex of the same program") {
    const Instance inst = random_instance(55, 3, 3, 4);
    const LpObjective obj = LpObjective::from_means(inst);
    const double best = solve_lp(inst, obj).value;
    for (long rot = 0; rot < 12; ++rot) {
      const ExtremePoint v = solve_lp_rotated(inst, obj, rot);
      CHECK(std::abs(v.value - best) <= 1e-9);
      CHECK(feasible(inst, v));
      CHECK(static_cast<int>(v.support.size()) <= 6);
    }
  }

  TEST_CASE("vertex support is at most k+m") {
    for (std::uint64_t seed : {10ull, 20ull, 30ull, 40ull}) {
      const Instance inst = random_instance(seed, 3, 3, 4);
      for (const auto& v : enumerate_extreme_points(inst))
        CHECK(static_cast<int>(v.support.size()) <= inst.num_arms() + inst.num_contexts());
      RandomStream rng(seed);
      LpObjective obj = LpObjective::from_means(inst);
      for (int rep = 0; rep < 50; ++rep) {
        for (std::size_t p = 0; p < obj.w.size(); ++p)
          obj.w[p] = rng.uniform(Purpose::Generic, 60 + rep, p);
        const ExtremePoint sol = solve_lp(inst, obj);
        CHECK(static_cast<int>(sol.support.size()) <=
              inst.num_arms() + inst.num_contexts());
        CHECK(feasible(inst, sol));
      }
    }
  }

  TEST_CASE("scaling the objective leaves the chosen vertex unchanged") {
    const Instance inst = random_instance(77, 3, 3, 3);
    LpObjective obj = LpObjective::from_means(inst);
    for (double& w : obj.w) w = 0.1 + 0.9 * w;
    const ExtremePoint base = solve_lp(inst, obj);
    for (double scale : {0.5, 2.0, 4.0}) {
      LpObjective scaled = obj;
      for (double& w : scaled.w) w *= scale;
      const ExtremePoint other = solve_lp(inst, scaled);
      for (std::size_t p = 0; p < base.z.size(); ++p)
        CHECK(base.z[p] == other.z[p]);
    }
  }

  TEST_CASE("gap report reproduces the closed-form gaps") {
    const GapReport rep = compute_gaps(gap_instance(3, 0.9));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double want = (i == j) ? 0.3 : 0.6;  // (1/k, 2/k) of delta
        CHECK(rep.delta_min_at(i, j, 3) == doctest::Approx(want).epsilon(1e-9));
      }
    CHECK(rep.delta_max == doctest::Approx(0.9).epsilon(1e-9));  // the zero vertex
    for (double d : rep.delta_by_vertex) CHECK(d >= -1e-12);
  }

  TEST_CASE("delta_max with a single nonzero vertex") {
    const Instance inst = Instance::validate({2}, {1.0}, {0.8});
    const GapReport rep = compute_gaps(inst);
    CHECK(rep.optimal_value == doctest::Approx(0.4));
    CHECK(rep.delta_max == doctest::Approx(0.4));
    CHECK(std::isinf(rep.delta_min[0]));
  }

  TEST_CASE("enumeration guard") {
    CHECK_THROWS_AS(enumerate_extreme_points(gap_instance(4, 0.5)), TooLargeError);
  }

  TEST_CASE("tp group index") {
    CHECK(tp_group_index(1.0) == 1);
    CHECK(tp_group_index(0.6) == 1);
    CHECK(tp_group_index(0.5) == 2);
    CHECK(tp_group_index(0.3) == 2);
    // boundary: 2^-2 is excluded from group 2 by the strict inequality,
    // confirmed by a direct scan over l
    int scanned = -1;
    for (int l = 1; l <= 60; ++l)
      if (std::ldexp(1.0, -l) < 0.25 && 0.25 <= std::ldexp(1.0, -l + 1)) scanned = l;
    CHECK(scanned == 3);
    CHECK(tp_group_index(0.25) == scanned);
    CHECK_THROWS_AS(tp_group_index(0.0), DomainError);
    CHECK_THROWS_AS(tp_group_index(-0.1), DomainError);
    CHECK_THROWS_AS(tp_group_index(1.1), DomainError);
  }

  TEST_CASE("extreme point json shape") {
    const ExtremePoint z = solve_lp(gap_instance(2, 0.5),
                                    LpObjective::from_means(gap_instance(2, 0.5)));
    const nlohmann::json j = z.to_json();
    CHECK(j.contains("z"));
    CHECK(j.contains("value"));
    CHECK(j.at("support").size() == z.support.size());
  }
}
