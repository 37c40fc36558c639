#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dmab/bounds.hpp"
#include "dmab/instances.hpp"

using namespace dmab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double delay_at(const DelayDist& d, double q) {
  const auto v = d.quantile(q);
  return v.is_infinite() ? kInf : static_cast<double>(v.value());
}

// Brute-force reference over the full grid^K lattice (small K only).
double brute_force_pse(const std::vector<double>& gaps, const std::vector<DelayDist>& delays,
                       std::uint64_t horizon) {
  const double log_t = std::log(static_cast<double>(horizon));
  const double log_k = std::log(static_cast<double>(gaps.size()));
  std::vector<int> subopt;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] > 0.0) subopt.push_back(static_cast<int>(i));

  double best = kInf;
  std::vector<int> g(subopt.size(), 0);
  for (;;) {
    double sum = 0.0, penalty = 0.0;
    for (std::size_t j = 0; j < subopt.size(); ++j) {
      const double q = static_cast<double>(g[j] + 1) / 100.0;
      const int i = subopt[j];
      sum += 290.0 * log_t / (q * gaps[i]);
      const double d = delay_at(delays[i], q);
      penalty = std::max(penalty, d == kInf ? kInf : d * gaps[i]);
    }
    if (penalty < kInf) best = std::min(best, sum + log_t * log_k * penalty);
    std::size_t carry = 0;
    while (carry < g.size() && ++g[carry] == 100) g[carry++] = 0;
    if (carry == g.size()) break;
  }
  return best;
}

double brute_force_se_per_arm(const std::vector<double>& gaps,
                              const std::vector<DelayDist>& delays, std::uint64_t horizon,
                              int opt) {
  const double log_t = std::log(static_cast<double>(horizon));
  const double log_k = std::log(static_cast<double>(gaps.size()));
  std::vector<int> subopt;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (static_cast<int>(i) != opt && gaps[i] > 0.0) subopt.push_back(static_cast<int>(i));

  double best = kInf;
  for (int gstar = 0; gstar < 100; ++gstar) {
    const double q_star = static_cast<double>(gstar + 1) / 100.0;
    const double d_star = delay_at(delays[opt], q_star);
    if (d_star == kInf) continue;
    std::vector<int> g(subopt.size(), 0);
    for (;;) {
      double sum = 0.0, penalty = 0.0;
      for (std::size_t j = 0; j < subopt.size(); ++j) {
        const double q = static_cast<double>(g[j] + 1) / 100.0;
        const int i = subopt[j];
        sum += 40.0 * log_t / gaps[i] * (1.0 / q + 1.0 / q_star);
        const double d = delay_at(delays[i], q);
        penalty = std::max(penalty, d == kInf ? kInf : (d + d_star) * gaps[i]);
      }
      if (penalty < kInf) best = std::min(best, sum + log_k * penalty);
      std::size_t carry = 0;
      while (carry < g.size() && ++g[carry] == 100) g[carry++] = 0;
      if (carry == g.size()) break;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single-quantile SE bound under fixed delays picks q = 1") {
  // Degenerate quantiles make the sum the only q-dependent term.
  const std::vector<double> gaps = {0.0, 0.2};
  const std::vector<DelayDist> delays = {DelayDist::fixed(100), DelayDist::fixed(100)};
  const double got = bound_value(BoundKind::kSeSingleQuantile, gaps, delays, 10000);
  const double expected = 325.0 * std::log(1e4) / 0.2 + 4.0 * 100.0;
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));

  const std::vector<double> gaps3 = {0.0, 0.1, 0.5};
  const std::vector<DelayDist> delays3 = {DelayDist::fixed(7), DelayDist::fixed(7),
                                          DelayDist::fixed(7)};
  const double got3 = bound_value(BoundKind::kSeSingleQuantile, gaps3, delays3, 2000);
  const double expected3 = 325.0 * std::log(2000.0) * (1.0 / 0.1 + 1.0 / 0.5) + 4.0 * 7.0;
  CHECK(got3 == doctest::Approx(expected3).epsilon(1e-12));
}

TEST_CASE("PSE bound under packet loss picks q_i at the arrival mass") {
  // d_i(q) jumps to infinity above p_i, so the minimizer sits exactly at p_i.
  const std::vector<double> gaps = {0.0, 0.2, 0.25};
  const std::vector<DelayDist> delays = {DelayDist::packet_loss(0.1),
                                         DelayDist::packet_loss(0.5),
                                         DelayDist::packet_loss(1.0)};
  const double got = bound_value(BoundKind::kPse, gaps, delays, 20000);
  const double log_t = std::log(20000.0);
  const double expected = 290.0 * log_t / (0.5 * 0.2) + 290.0 * log_t / (1.0 * 0.25);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("per-arm SE bound under shared fixed delay") {
  // q = 1 everywhere; the max penalty is over (2d) * gap_i.
  const std::vector<double> gaps = {0.0, 0.2, 0.4};
  const std::vector<DelayDist> delays(3, DelayDist::fixed(50));
  const double got = bound_value(BoundKind::kSePerArm, gaps, delays, 5000);
  const double log_t = std::log(5000.0);
  const double expected = 40.0 * log_t * 2.0 * (1.0 / 0.2 + 1.0 / 0.4) +
                          std::log(3.0) * 100.0 * 0.4;
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("OPSE bound formula on enumerable marginals") {
  const auto inst = make_reward_dependent_bias(3, 500, 11);
  const auto delays = inst.marginal_delays();
  const double got = bound_value(BoundKind::kOpse, inst.gaps, delays, 60000);

  const double log_t = std::log(60000.0);
  double sum = 0.0, d_max = 0.0, gap_min = kInf;
  for (int i = 0; i < 3; ++i) {
    if (inst.gaps[i] == 0.0) continue;
    sum += 1166.0 * log_t / inst.gaps[i];
    gap_min = std::min(gap_min, inst.gaps[i]);
    d_max = std::max(d_max, delay_at(delays[i], 1.0 - inst.gaps[i] / 4.0));
  }
  const double d_opt = delay_at(delays[inst.optimal_arm], 1.0 - gap_min / 4.0);
  CHECK(got == doctest::Approx(sum + 4.0 * std::log(3.0) * (d_max + d_opt)).epsilon(1e-12));
}

TEST_CASE("all-zero gaps give a zero bound by convention") {
  const std::vector<double> gaps = {0.0, 0.0};
  const std::vector<DelayDist> delays = {DelayDist::pareto(0.5), DelayDist::fixed(9)};
  for (auto kind : {BoundKind::kSePerArm, BoundKind::kSeSingleQuantile, BoundKind::kPse,
                    BoundKind::kOpse})
    CHECK(bound_value(kind, gaps, delays, 1000) == 0.0);
}

TEST_CASE("bound input validation") {
  CHECK_THROWS(bound_value(BoundKind::kPse, {0.1, 0.2}, {DelayDist::fixed(0)}, 100));
  CHECK_THROWS(bound_value(BoundKind::kPse, {0.1, 0.2},
                           {DelayDist::fixed(0), DelayDist::fixed(0)}, 100));  // no zero gap
}

TEST_CASE("grid optimizer agrees with brute force on mixed delay laws") {
  const std::vector<double> gaps = {0.0, 0.15, 0.3};
  const std::vector<DelayDist> delays = {
      DelayDist::table({{ExtendedDelay::finite(3), 0.4},
                        {ExtendedDelay::finite(60), 0.35},
                        {ExtendedDelay::infinity(), 0.25}}),
      DelayDist::pareto(0.6),
      DelayDist::two_point(25, 0.55),
  };
  const std::uint64_t horizon = 4000;

  const double pse_fast = bound_value(BoundKind::kPse, gaps, delays, horizon);
  const double pse_slow = brute_force_pse(gaps, delays, horizon);
  CHECK(pse_fast == doctest::Approx(pse_slow).epsilon(1e-9));

  const double se_fast = bound_value(BoundKind::kSePerArm, gaps, delays, horizon);
  const double se_slow = brute_force_se_per_arm(gaps, delays, horizon, 0);
  CHECK(se_fast == doctest::Approx(se_slow).epsilon(1e-9));
}

TEST_CASE("infeasible quantiles propagate as an infinite bound") {
  // Both arms lose 95% of feedback; the single-quantile grid stops at 0.05.
  const std::vector<double> gaps = {0.0, 0.2};
  const std::vector<DelayDist> delays = {DelayDist::packet_loss(0.05),
                                         DelayDist::packet_loss(0.05)};
  const double got = bound_value(BoundKind::kSeSingleQuantile, gaps, delays, 1000);
  CHECK(got < kInf);  // q = 0.01..0.05 still feasible
  const std::vector<DelayDist> hopeless = {DelayDist::packet_loss(0.001),
                                           DelayDist::packet_loss(0.001)};
  CHECK(bound_value(BoundKind::kSeSingleQuantile, gaps, hopeless, 1000) == kInf);
  CHECK(bound_value(BoundKind::kOpse, gaps, hopeless, 1000) == kInf);
}
