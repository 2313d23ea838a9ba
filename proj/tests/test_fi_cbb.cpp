#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "cbb/environment.hpp"
#include "cbb/fi_cbb.hpp"
#include "cbb/instance.hpp"
#include "cbb/lp.hpp"
#include "cbb/random.hpp"

using namespace cbb;

namespace {

ExtremePoint manual_point(const Instance& inst, std::vector<double> z) {
  ExtremePoint ep;
  ep.k = inst.num_arms();
  ep.m = inst.num_contexts();
  ep.z = std::move(z);
  ep.finalize(LpObjective::from_means(inst));
  return ep;
}

}  // namespace

TEST_SUITE("fi_cbb") {
  TEST_CASE("unit delay arms have q = beta = 1") {
    const Instance inst = Instance::validate({1, 1}, {1.0}, {0.5, 0.4});
    AvailabilitySchedule sched(inst, solve_lp(inst, LpObjective::from_means(inst)));
    for (long t = 1; t <= 40; ++t)
      for (int i = 0; i < 2; ++i) {
        CHECK(sched.q(i, t) == 1.0);
        CHECK(sched.beta(i, t) == 1.0);
      }
  }

  TEST_CASE("first-round non-skipping probability is d/(2d-1)") {
    const Instance inst = integral_instance(0.4);
    AvailabilitySchedule sched(inst, solve_lp(inst, LpObjective::from_means(inst)));
    for (int i = 0; i < 3; ++i)
      CHECK(sched.beta(i, 1) == doctest::Approx(3.0 / 5).epsilon(1e-12));
  }

  TEST_CASE("hand-unrolled recursion, single arm d=2 with z-mass 1/2") {
    const Instance inst = Instance::validate({2}, {1.0}, {1.0});
    AvailabilitySchedule sched(inst, manual_point(inst, {0.5}));
    CHECK(sched.q(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sched.beta(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(sched.q(0, 2) == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(sched.beta(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    for (long t = 3; t <= 30; ++t)
      CHECK(sched.q(0, t) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  }

  TEST_CASE("lazy block extension is exact") {
    const Instance inst = nonintegral_3x3();
    const ExtremePoint z = solve_lp(inst, LpObjective::from_means(inst));
    AvailabilitySchedule jump(inst, z);
    AvailabilitySchedule stepwise(inst, z);
    for (long t = 1; t <= 3000; t += 7) stepwise.q(0, t);
    for (int i = 0; i < 3; ++i)
      for (long t : {1L, 1023L, 1024L, 1025L, 2900L})
        CHECK(jump.q(i, t) == stepwise.q(i, t));
  }

  TEST_CASE("zero marginal mass always lp-skips") {
    const Instance inst = Instance::validate({2}, {1.0}, {0.5});
    FiCbbPolicy policy(inst, manual_point(inst, {0.0}), RandomStream(4));
    BlockState blocks = BlockState::fresh(inst);
    for (long t = 1; t <= 50; ++t) {
      const RoundOutcome out = policy.decide(t, 0, blocks);
      CHECK(out.event == RoundEvent::LpSkip);
      CHECK(out.action == kNoArm);
    }
  }

  TEST_CASE("unit-delay instance always plays the sampled arm") {
    const Instance inst = Instance::validate({1}, {1.0}, {0.9});
    FiCbbPolicy policy(inst, solve_lp(inst, LpObjective::from_means(inst)),
                       RandomStream(6));
    BlockState blocks = BlockState::fresh(inst);
    for (long t = 1; t <= 200; ++t) {
      const RoundOutcome out = policy.decide(t, 0, blocks);
      CHECK(out.event == RoundEvent::Play);
      blocks = apply_action(std::move(blocks), inst, out.action);
    }
  }

  TEST_CASE("play probability is exactly (d/(2d-1)) z* per pair and round") {
    const Instance inst = integral_instance(0.4);
    const ExtremePoint zstar = solve_lp(inst, LpObjective::from_means(inst));
    const int runs = 20000, horizon = 30;
    std::vector<long> plays(9 * horizon, 0);
    for (int run = 0; run < runs; ++run) {
      RandomStream stream(RandomStream::derive(31337, run));
      FiCbbPolicy policy(inst, zstar, stream);
      BlockState blocks = BlockState::fresh(inst);
      for (long t = 1; t <= horizon; ++t) {
        const int ctx = sample_context(inst, stream, t);
        const RoundOutcome out = policy.decide(t, ctx, blocks);
        if (out.action != kNoArm)
          ++plays[(out.action * 3 + ctx) * horizon + t - 1];
        blocks = apply_action(std::move(blocks), inst, out.action);
      }
    }
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double p = (3.0 / 5) * zstar.at(i, j);  // includes P[C_t = j]
        for (long t = 1; t <= horizon; ++t) {
          const double freq = plays[(i * 3 + j) * horizon + t - 1] /
                              static_cast<double>(runs);
          if (p == 0.0) {
            CHECK(freq == 0.0);
          } else {
            const double sigma = std::sqrt(p * (1 - p) / runs);
            worst = std::max(worst, std::abs(freq - p) / sigma);
          }
        }
      }
    CHECK(worst <= 5.0);
  }

  TEST_CASE("event partition: each round is exactly one of the four events") {
    const Instance inst = nonintegral_3x3();
    FiCbbPolicy policy(inst, solve_lp(inst, LpObjective::from_means(inst)),
                       RandomStream(8));
    BlockState blocks = BlockState::fresh(inst);
    const RandomStream nature(9);
    long counts[4] = {0, 0, 0, 0};
    const long horizon = 500;
    for (long t = 1; t <= horizon; ++t) {
      const int ctx = sample_context(inst, nature, t);
      const RoundOutcome out = policy.decide(t, ctx, blocks);
      ++counts[static_cast<int>(out.event)];
      CHECK((out.action != kNoArm) == (out.event == RoundEvent::Play));
      blocks = apply_action(std::move(blocks), inst, out.action);
    }
    CHECK(counts[0] + counts[1] + counts[2] + counts[3] == horizon);
  }

  TEST_CASE("schedule csv dump") {
    const Instance inst = integral_instance(0.6);
    AvailabilitySchedule sched(inst, solve_lp(inst, LpObjective::from_means(inst)));
    const std::string path = "/tmp/cbb_schedule_test.csv";
    sched.dump_csv(path, 10);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,arm,q,beta");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 30);  // 10 rounds x 3 arms
  }
}
