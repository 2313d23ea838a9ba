#include <doctest.h>

#include "cbb/instance.hpp"

using namespace cbb;

TEST_SUITE("instance") {
  TEST_CASE("minimal instance validates") {
    const Instance inst = Instance::validate({1}, {1.0}, {0.5});
    CHECK(inst.num_arms() == 1);
    CHECK(inst.num_contexts() == 1);
    CHECK(inst.max_delay() == 1);
    CHECK(inst.mean(0, 0) == 0.5);
  }

  TEST_CASE("probability mass must sum to one") {
    CHECK_THROWS_AS(Instance::validate({1, 1}, {0.6, 0.5}, {0.1, 0.2, 0.3, 0.4}),
                    ProbabilityMassError);
  }

  TEST_CASE("range and delay violations") {
    CHECK_THROWS_AS(Instance::validate({1}, {1.0}, {1.5}), RangeError);
    CHECK_THROWS_AS(Instance::validate({1}, {1.0}, {-0.1}), RangeError);
    CHECK_THROWS_AS(Instance::validate({0}, {1.0}, {0.5}), DelayError);
    CHECK_THROWS_AS(Instance::validate({1, 1}, {1.2, -0.2}, {0.1, 0.2, 0.3, 0.4}),
                    RangeError);
  }

  TEST_CASE("zero-probability contexts are allowed") {
    const Instance inst = Instance::validate({2}, {0.0, 1.0}, {0.5, 0.7});
    CHECK(inst.context_prob(0) == 0.0);
  }

  TEST_CASE("integral instance matches its definition") {
    const Instance inst = integral_instance(0.4);
    CHECK(inst.num_arms() == 3);
    CHECK(inst.num_contexts() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(inst.delay(i) == 3);
      CHECK(inst.context_prob(i) == doctest::Approx(1.0 / 3).epsilon(1e-12));
      CHECK(inst.mean(i, i) == doctest::Approx(0.9));
    }
    CHECK(inst.mean(1, 2) == doctest::Approx(0.5));  // 0.9 - gap
    CHECK(inst.mean(0, 1) == doctest::Approx(0.5));
  }

  TEST_CASE("gap instance puts delta on the diagonal") {
    const Instance inst = gap_instance(3, 0.9);
    CHECK(inst.delay(0) == 3);
    CHECK(inst.context_prob(2) == doctest::Approx(1.0 / 3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(inst.mean(i, j) == doctest::Approx(i == j ? 0.9 : 0.0));
  }

  TEST_CASE("hardness instance rescales rewards into [0,1]") {
    const Instance inst = hardness_instance(3, 0.1, 0.7);
    CHECK(inst.context_prob(0) == doctest::Approx(0.1));
    CHECK(inst.context_prob(1) == doctest::Approx(0.9));
    // (0.7/0.1) / (1 + 7) = 0.875 and 1/8 = 0.125
    CHECK(inst.mean(0, 0) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(inst.mean(0, 1) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(inst.mean(1, 0) == 0.0);
    CHECK(inst.reward_kind() == RewardKind::Deterministic);
    CHECK(inst.max_delay() == 3);
  }

  TEST_CASE("named instances validate for legal parameters") {
    CHECK_NOTHROW(integral_instance(0.9));
    CHECK_NOTHROW(integral_instance(0.05));
    CHECK_NOTHROW(nonintegral_3x3());
    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
      CHECK_NOTHROW(nonintegral_3x3_d6(seed));
      CHECK_NOTHROW(nonintegral_10x10(seed));
    }
    for (int k : {1, 2, 5}) CHECK_NOTHROW(gap_instance(k, 0.9));
    CHECK_NOTHROW(hardness_instance(2, 0.01, 1.5));
  }

  TEST_CASE("named instance dispatch") {
    const Instance inst =
        named_instance("integral", nlohmann::json{{"gap", 0.4}});
    CHECK(inst.mean(0, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(named_instance("nope", {}), UnknownNameError);
    CHECK_THROWS_AS(named_instance("integral", nlohmann::json{{"gap", 0.0}}), ParamError);
    CHECK_THROWS_AS(named_instance("integral", nlohmann::json{{"gap", 1.0}}), ParamError);
    CHECK_THROWS_AS(
        named_instance("integral", nlohmann::json{{"gap", 0.4}, {"bogus", 1}}),
        ParamError);
  }

  TEST_CASE("random named instances are reproducible") {
    const Instance a = nonintegral_3x3_d6(5);
    const Instance b = nonintegral_3x3_d6(5);
    const Instance c = nonintegral_3x3_d6(6);
    CHECK(a.means_row_major() == b.means_row_major());
    CHECK(a.context_probs() == b.context_probs());
    CHECK(a.means_row_major() != c.means_row_major());
    for (int i = 0; i < 3; ++i) {
      CHECK(a.delay(i) == 6);
      CHECK(a.mean(i, i) >= 0.5);
      CHECK(a.mean(i, i) <= 0.9);
    }
    const Instance big = nonintegral_10x10(3);
    for (int i = 0; i < 10; ++i) {
      CHECK((big.delay(i) == 8 || big.delay(i) == 9));
      CHECK(big.mean(i, i) == doctest::Approx(0.9));
    }
  }

  TEST_CASE("json round trip") {
    const Instance inst = nonintegral_3x3();
    const Instance back = Instance::from_json(inst.to_json());
    CHECK(back.means_row_major() == inst.means_row_major());
    CHECK(back.delays() == inst.delays());
    CHECK(back.context_probs() == inst.context_probs());
    CHECK(back.reward_kind() == inst.reward_kind());

    // flat row-major means are accepted too
    nlohmann::json j = inst.to_json();
    j["means"] = inst.means_row_major();
    CHECK(Instance::from_json(j).mean(1, 2) == inst.mean(1, 2));
  }
}
