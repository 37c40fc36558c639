#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmab/distributions.hpp"
#include "dmab/instances.hpp"

// Empirical statistical verification of the concentration lemmas: each check
// runs seeded Monte-Carlo trials through the environment and compares the
// observed failure rate against the lemma's ceiling plus three binomial
// standard errors of the empirical rate. Each check has a deliberately
// violating twin configuration that must fail, guarding against vacuous
// passes. Deterministic given (seed, trials).

namespace dmab {

struct OracleReport {
  std::string lemma;
  std::string detail;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double observed_rate = 0.0;
  double ceiling = 0.0;
  double slack = 0.0;  // 3 binomial standard errors of the observed rate
  bool vacuous = false;
  bool pass = false;
};

// Observed-mean concentration: the within-run frequency of any arm/time pair
// whose observed mean leaves the +-sqrt(2 log T / n) band, against 2/T^2.
// radius_mult shrinks the band for the negative control; reward_p = 1 makes
// the rewards a point mass and the band can never be left.
OracleReport check_estimator_concentration(std::uint64_t horizon, int k, std::uint64_t trials,
                                           std::uint64_t seed, int threads,
                                           double radius_mult = 1.0, double reward_p = 0.5);

// Quantile observation count, multiplicative form: after m consecutive pulls,
// Pr[observations by round m + d(q) < q*m/2] against exp(-q*m/8).
// assumed_quantile overrides d(q) for the negative control; an infinite d(q)
// makes the check vacuous (all eventually-arriving feedback is counted).
OracleReport check_chernoff_quantile(const DelayDist& dist, double q, std::uint64_t m,
                                     std::uint64_t trials, std::uint64_t seed, int threads,
                                     std::optional<std::uint64_t> assumed_quantile = {});

// Quantile observation count, additive form: after m consecutive pulls,
// Pr[n < q*m_lag - sqrt(2 log T * m)] against 1/T^4, where m_lag counts the
// pulls made up to d(q) rounds before the end.
OracleReport check_hoeffding_quantile(const DelayDist& dist, double q, std::uint64_t m,
                                      std::uint64_t horizon_for_bound, std::uint64_t trials,
                                      std::uint64_t seed, int threads,
                                      std::optional<std::uint64_t> assumed_quantile = {});

// Optimistic-pessimistic interval width along OPSE traces: at every round and
// active arm, mu_plus - mu_minus <= (m_t - m_{t-d_i(q_i)})/m_t + 1 - q_i +
// sqrt(2 log T / m_t); per-trial any-violation rate against 1/T^4.
OracleReport check_interval_size(const InstanceSpec& instance, std::uint64_t horizon,
                                 const std::vector<double>& q_per_arm, std::uint64_t trials,
                                 std::uint64_t seed, int threads,
                                 const std::vector<std::optional<std::uint64_t>>&
                                     assumed_quantiles = {});

struct OracleOutcome {
  OracleReport report;
  bool negative_control = false;
  bool ok = false;  // positive checks must pass, controls must fail
};

// The full suite at its documented settings; lemma filter optional.
std::vector<OracleOutcome> run_oracle_suite(std::uint64_t seed, int threads,
                                            const std::string& only_lemma = "");

std::string format_report_line(const OracleOutcome& outcome);

}  // namespace dmab
