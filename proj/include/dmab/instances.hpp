#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmab/distributions.hpp"

// Named, parameterized environments: the four reproduction experiments, the
// UCB adversarial construction, the two-point lower-bound family and the
// reward-dependent lower-bound pair I1/I2.

namespace dmab {

struct InstanceSpec {
  std::string name;
  std::vector<ArmModel> arms;
  int optimal_arm = 0;
  std::vector<double> gaps;  // gaps[optimal_arm] == 0, consistent with arm means
  std::string provenance;

  int num_arms() const { return static_cast<int>(arms.size()); }
  double min_positive_gap() const;
  std::vector<DelayDist> marginal_delays() const;

  friend bool operator==(const InstanceSpec& a, const InstanceSpec& b) {
    return a.name == b.name && a.arms == b.arms && a.optimal_arm == b.optimal_arm &&
           a.gaps == b.gaps && a.provenance == b.provenance;
  }
};

// Builds gaps from arm means and validates consistency.
InstanceSpec finish_instance(std::string name, std::vector<ArmModel> arms,
                             std::string provenance);

// K Bernoulli arms, means uniform in [0.25, 0.75], all delays Fixed(d).
InstanceSpec make_fig1(int k, std::uint64_t delay, std::uint64_t mean_seed);

// One deterministic-reward-1 arm at a uniformly random index in the upper
// half, K-1 Bernoulli(1/2) arms, all Fixed(d); requires d >= K.
InstanceSpec make_ucb_adversarial(int k, std::uint64_t delay, std::uint64_t index_seed);

// Two Bernoulli arms, means 0.4 and 0.4 + delta, Pareto(alpha1)/Pareto(alpha2) delays.
InstanceSpec make_pareto(double delta, double alpha1, double alpha2);

// Optimal arm observed with probability p_opt (packet loss), sub-optimal arms
// always observed; gaps uniform in [0.15, 0.25]; optimal mean 0.6.
InstanceSpec make_packet_loss(int k, double p_opt, std::uint64_t gap_seed);

// Reward-dependent bias: delay d_big for reward 1 of the best arm and reward 0
// of the sub-optimal arms, zero otherwise; gaps uniform in [0.15, 0.25].
InstanceSpec make_reward_dependent_bias(int k, std::uint64_t d_big, std::uint64_t gap_seed);

enum class DepLowerVariant { kI1, kI2 };

// The indistinguishable pair: arm 1 is Bernoulli(1/2) with reward-independent
// delay {d_tilde w.p. 1-2*delta, 0 otherwise}; arm 2 has mean 1/2 -+ delta and
// a reward-conditional delay tuned so that Pr(d=0) = 1-2*delta and
// Pr(r=1 | d=0) = 1/2 under both variants. Requires delta in (0, 1/2].
InstanceSpec make_dep_lower(DepLowerVariant variant, double delta, std::uint64_t d_tilde);

// Bernoulli arms with means 1/2 - gap_i and shared TwoPoint(d_tilde, q) delays,
// arm order uniformly permuted.
InstanceSpec make_twopoint_lower(const std::vector<double>& gaps, std::uint64_t d_tilde,
                                 double q, std::uint64_t perm_seed);

}  // namespace dmab
