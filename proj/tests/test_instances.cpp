#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "dmab/environment.hpp"
#include "dmab/instances.hpp"
#include "dmab/serialize.hpp"
#include "dmab/sim.hpp"

using namespace dmab;

TEST_CASE("fig1 construction: deterministic means in range, fixed delays") {
  const auto a = make_fig1(20, 500, 12061);
  const auto b = make_fig1(20, 500, 12061);
  CHECK(a == b);
  CHECK(a.num_arms() == 20);
  for (const auto& arm : a.arms) {
    CHECK(arm.mean() >= 0.25);
    CHECK(arm.mean() <= 0.75);
    CHECK(arm.conditionals().front().second == DelayDist::fixed(500));
  }
  CHECK(a.gaps[a.optimal_arm] == 0.0);
  const auto zero_delay = make_fig1(20, 0, 12061);  // classic MAB
  CHECK(zero_delay.arms[0].conditionals().front().second == DelayDist::fixed(0));
  CHECK(make_fig1(20, 500, 777).arms[0].mean() != a.arms[0].mean());
}

TEST_CASE("instance gaps are consistent with means") {
  for (const auto& inst :
       {make_fig1(8, 10, 3), make_packet_loss(6, 0.2, 5), make_reward_dependent_bias(3, 100, 9),
        make_pareto(0.24, 1.0, 0.2)}) {
    double best = 0.0;
    for (const auto& arm : inst.arms) best = std::max(best, arm.mean());
    CHECK(inst.arms[inst.optimal_arm].mean() == doctest::Approx(best).epsilon(1e-15));
    for (int i = 0; i < inst.num_arms(); ++i)
      CHECK(inst.gaps[i] == doctest::Approx(best - inst.arms[i].mean()).epsilon(1e-12));
  }
}

TEST_CASE("ucb adversarial construction") {
  CHECK_THROWS(make_ucb_adversarial(10, 9, 1));  // requires d >= K
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = make_ucb_adversarial(10, 100, seed);
    CHECK(inst.optimal_arm >= 5);  // upper half only
    CHECK(inst.optimal_arm <= 9);
    seen.insert(inst.optimal_arm);
    for (int i = 0; i < 10; ++i)
      CHECK(inst.gaps[i] == (i == inst.optimal_arm ? 0.0 : 0.5));
  }
  CHECK(seen.size() == 5);  // every upper-half index occurs
}

TEST_CASE("ucb adversarial first-sweep lucky mass") {
  // Empirical Pr[sum of first-sweep rewards over arms <= optimal >= K/4].
  const auto inst = make_ucb_adversarial(20, 100, 4);
  Xoshiro256pp rng(5);
  int hits = 0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    double sum = 0.0;
    for (int i = 0; i <= inst.optimal_arm; ++i) sum += inst.arms[i].sample_reward(rng);
    if (sum >= 5.0) ++hits;  // K/4 = 5
  }
  CHECK(static_cast<double>(hits) / trials >= 0.1);
}

TEST_CASE("pareto instance matches the reproduction grid") {
  const auto inst = make_pareto(0.04, 1.0, 0.2);
  CHECK(inst.arms[0].mean() == doctest::Approx(0.4));
  CHECK(inst.arms[1].mean() == doctest::Approx(0.44));
  CHECK(inst.optimal_arm == 1);
  CHECK(inst.arms[0].conditionals().front().second == DelayDist::pareto(1.0));
  CHECK(inst.arms[1].conditionals().front().second == DelayDist::pareto(0.2));

  const auto flat = make_pareto(0.0, 1.0, 0.8);
  CHECK(flat.gaps == std::vector<double>{0.0, 0.0});  // regret identically zero
}

TEST_CASE("packet-loss instance quantiles and gap range") {
  const auto inst = make_packet_loss(10, 0.1, 7551);
  CHECK(inst.optimal_arm == 0);
  const auto opt_delay = inst.arms[0].marginal_delay();
  CHECK(opt_delay.quantile(0.1) == ExtendedDelay::finite(0));
  CHECK(opt_delay.quantile(0.11).is_infinite());
  for (int i = 1; i < 10; ++i) {
    CHECK(inst.gaps[i] >= 0.15);
    CHECK(inst.gaps[i] <= 0.25);
    CHECK(inst.arms[i].marginal_delay().quantile(1.0) == ExtendedDelay::finite(0));
  }
  const auto no_delay = make_packet_loss(10, 1.0, 7551);
  CHECK(no_delay.arms[0].marginal_delay().quantile(1.0) == ExtendedDelay::finite(0));
}

TEST_CASE("reward-dependent bias starves the optimal arm's ones") {
  const auto inst = make_reward_dependent_bias(3, 200, 3407);
  REQUIRE(inst.optimal_arm == 0);
  CHECK(inst.arms[0].mean() == doctest::Approx(0.6));
  for (int i = 1; i < 3; ++i) {
    CHECK(inst.gaps[i] >= 0.15);
    CHECK(inst.gaps[i] <= 0.25);
  }

  // During the first d_big rounds only reward-0 feedback from the optimal arm
  // arrives, so its observed mean is biased low (here: exactly zero).
  Environment env(inst.arms, inst.gaps, 199, 42);
  double observed_sum = 0.0;
  std::uint64_t observed_n = 0;
  for (int t = 1; t <= 199; ++t) {
    for (const auto& e : env.step(0)) {
      observed_sum += e.reward;
      observed_n += 1;
    }
  }
  CHECK(observed_n > 0);
  CHECK(observed_sum == 0.0);
  CHECK(env.full_information_mean(0) > 0.4);  // the side channel sees the truth
}

TEST_CASE("dep-lower pair: marginal delay and conditional reward symmetry") {
  const double delta = 0.1;
  for (auto variant : {DepLowerVariant::kI1, DepLowerVariant::kI2}) {
    const auto inst = make_dep_lower(variant, delta, 500);
    const auto& arm2 = inst.arms[1];
    // Pr(d = 0 | arm 2) = 1 - 2*delta under both variants.
    CHECK(arm2.marginal_delay_cdf(0) == doctest::Approx(1.0 - 2.0 * delta).epsilon(1e-12));
    CHECK(arm2.marginal_delay_cdf(499) == doctest::Approx(1.0 - 2.0 * delta).epsilon(1e-12));
    CHECK(arm2.marginal_delay_cdf(500) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Pr(r = 1 | d = 0) = 1/2 under both variants: the indistinguishability core.
  for (auto variant : {DepLowerVariant::kI1, DepLowerVariant::kI2}) {
    const auto inst = make_dep_lower(variant, delta, 500);
    const auto& arm2 = inst.arms[1];
    Xoshiro256pp rng(777);
    std::uint64_t zero_delay = 0, one_given_zero = 0;
    for (int i = 0; i < 1000000; ++i) {
      const double r = arm2.sample_reward(rng);
      const auto d = arm2.sample_delay(r, rng);
      if (d == ExtendedDelay::finite(0)) {
        zero_delay += 1;
        if (r == 1.0) one_given_zero += 1;
      }
    }
    const double conditional =
        static_cast<double>(one_given_zero) / static_cast<double>(zero_delay);
    CHECK(std::abs(conditional - 0.5) < 0.002);
  }
}

TEST_CASE("dep-lower boundary and validation") {
  CHECK_THROWS(make_dep_lower(DepLowerVariant::kI1, 0.0, 10));
  CHECK_THROWS(make_dep_lower(DepLowerVariant::kI1, 0.51, 10));
  // delta = 1/2 puts the entire reward-0 mass on d_tilde.
  const auto inst = make_dep_lower(DepLowerVariant::kI1, 0.5, 10);
  const auto& conditionals = inst.arms[1].conditionals();
  CHECK(conditionals[0].first == 0.0);
  CHECK(conditionals[0].second.quantile(1.0) == ExtendedDelay::finite(10));
  CHECK(conditionals[0].second.cdf(9) == doctest::Approx(0.0));
}

TEST_CASE("twopoint instance blocks all feedback before d_tilde") {
  const auto inst = make_twopoint_lower({0.0, 0.1, 0.2}, 40, 0.6, 5);
  Environment env(inst.arms, inst.gaps, 80, 9);
  for (int t = 1; t <= 40; ++t) CHECK(env.step(t % 3).empty());

  // q = 1 degenerates to a fixed delay.
  const auto fixed = make_twopoint_lower({0.0, 0.1}, 25, 1.0, 5);
  CHECK(fixed.arms[0].marginal_delay().quantile(1.0) == ExtendedDelay::finite(25));
  CHECK(fixed.arms[0].marginal_delay().infinite_mass() == doctest::Approx(0.0));

  CHECK_THROWS(make_twopoint_lower({0.3}, 10, 0.5, 1));  // gaps above 1/4
}

TEST_CASE("uniform policy incurs the mean gap per round before d_tilde") {
  // Exact expectation of a uniform pull is the average gap; Monte-Carlo mean
  // over seeds must match within 4 combined standard errors by round d_tilde.
  const std::vector<double> gaps = {0.0, 0.08, 0.16, 0.24};
  const auto inst = make_twopoint_lower(gaps, 50, 0.7, 3);
  double gap_bar = 0.0;
  for (double g : inst.gaps) gap_bar += g;
  gap_bar /= static_cast<double>(inst.gaps.size());

  const int runs = 2000;
  double sum = 0.0, sumsq = 0.0;
  for (int j = 0; j < runs; ++j) {
    const auto rec = simulate_run(inst, "uniform", RadiusSpec{}, 50, mix_seed(88, j), 50);
    sum += rec.regret_curve.back();
    sumsq += rec.regret_curve.back() * rec.regret_curve.back();
  }
  const double mean = sum / runs;
  const double sd = std::sqrt((sumsq - runs * mean * mean) / (runs - 1));
  const double se = sd / std::sqrt(static_cast<double>(runs));
  CHECK(std::abs(mean - 50.0 * gap_bar) <= 4.0 * se);
}

TEST_CASE("every catalog instance round-trips through JSON unchanged") {
  const std::vector<InstanceSpec> catalog = {
      make_fig1(20, 500, 12061),
      make_ucb_adversarial(10, 100, 99),
      make_pareto(0.2, 1.0, 0.2),
      make_packet_loss(10, 0.1, 7551),
      make_reward_dependent_bias(3, 5000, 3407),
      make_dep_lower(DepLowerVariant::kI1, 0.1, 2500),
      make_dep_lower(DepLowerVariant::kI2, 0.1, 2500),
      make_twopoint_lower({0.0, 0.1, 0.2}, 100, 0.5, 1),
  };
  for (const auto& inst : catalog) {
    const auto j = to_json(inst);
    const auto back = instance_from_json(j);
    CHECK(back == inst);
    CHECK(to_json(back) == j);
  }
}
