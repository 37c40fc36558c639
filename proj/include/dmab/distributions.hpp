#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dmab/rng.hpp"

// Reward laws, delay laws with exact integer quantile functions, and the joint
// per-arm reward/delay model. All objects are immutable after construction and
// safe to share across runs; every sample consumes exactly one uniform draw so
// RNG streams stay aligned across model variants.

namespace dmab {

// A delay in rounds: a natural number or "never arrives".
class ExtendedDelay {
 public:
  static constexpr std::uint64_t kInfiniteValue = UINT64_MAX;

  constexpr ExtendedDelay() : v_(0) {}
  static constexpr ExtendedDelay finite(std::uint64_t d) { return ExtendedDelay(d); }
  static constexpr ExtendedDelay infinity() { return ExtendedDelay(kInfiniteValue); }

  constexpr bool is_infinite() const { return v_ == kInfiniteValue; }
  // Valid only when finite.
  constexpr std::uint64_t value() const { return v_; }

  friend constexpr bool operator==(ExtendedDelay a, ExtendedDelay b) { return a.v_ == b.v_; }
  friend constexpr bool operator!=(ExtendedDelay a, ExtendedDelay b) { return a.v_ != b.v_; }
  // Finite values compare below infinity.
  friend constexpr bool operator<(ExtendedDelay a, ExtendedDelay b) { return a.v_ < b.v_; }
  friend constexpr bool operator<=(ExtendedDelay a, ExtendedDelay b) { return a.v_ <= b.v_; }

 private:
  explicit constexpr ExtendedDelay(std::uint64_t v) : v_(v) {}
  std::uint64_t v_;
};

class RewardDist {
 public:
  enum class Kind { kBernoulli, kPointMass };

  static RewardDist bernoulli(double p);
  static RewardDist point_mass(double v);

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  double mean() const { return kind_ == Kind::kBernoulli ? param_ : param_; }
  std::vector<double> support() const;

  // Consumes exactly one uniform draw.
  double sample(Xoshiro256pp& rng) const;

  friend bool operator==(const RewardDist& a, const RewardDist& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_;
  }

 private:
  RewardDist(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;  // p for Bernoulli, v for PointMass
};

class DelayDist {
 public:
  enum class Kind { kFixed, kPacketLoss, kTwoPoint, kPareto, kTable };

  struct TableEntry {
    ExtendedDelay delay;
    double prob;
    friend bool operator==(const TableEntry& a, const TableEntry& b) {
      return a.delay == b.delay && a.prob == b.prob;
    }
  };

  static DelayDist fixed(std::uint64_t d);
  // 0 with probability p, infinite otherwise.
  static DelayDist packet_loss(double p);
  // d_tilde with probability q, infinite otherwise.
  static DelayDist two_point(std::uint64_t d_tilde, double q);
  // Ceiling of a continuous Pareto(alpha, scale 1) sample: Pr[D <= g] = 1 - g^(-alpha).
  static DelayDist pareto(double alpha);
  // Probabilities must sum to 1 within 1e-12; zero-probability entries are dropped.
  static DelayDist table(std::vector<TableEntry> entries);

  Kind kind() const { return kind_; }
  std::uint64_t fixed_value() const { return d_; }
  double prob_param() const { return p_; }
  double alpha() const { return alpha_; }
  const std::vector<TableEntry>& entries() const { return entries_; }

  // Consumes exactly one uniform draw, whether the outcome is finite or not.
  ExtendedDelay sample(Xoshiro256pp& rng) const;

  // Pr[D <= g] for finite g; nondecreasing, right-continuous on integers.
  double cdf(std::uint64_t g) const;

  // min{g in N : cdf(g) >= q}, or infinity if no finite g qualifies.
  // Requires q in (0, 1].
  ExtendedDelay quantile(double q) const;

  // Largest finite support point, or infinity for unbounded support (Pareto).
  ExtendedDelay finite_support_max() const;
  double infinite_mass() const;

  friend bool operator==(const DelayDist& a, const DelayDist& b);

 private:
  DelayDist() = default;
  Kind kind_ = Kind::kFixed;
  std::uint64_t d_ = 0;   // Fixed / TwoPoint
  double p_ = 0.0;        // PacketLoss p / TwoPoint q
  double alpha_ = 0.0;    // Pareto
  std::vector<TableEntry> entries_;  // Table, sorted by delay ascending
};

// Joint reward/delay law of one arm: a reward distribution plus one delay law
// per reward support point. Reward-independent arms use the same law everywhere.
class ArmModel {
 public:
  static ArmModel independent(RewardDist reward, DelayDist delay);
  // conditional: (reward support point, delay law) pairs, exactly one per support point.
  static ArmModel reward_dependent(RewardDist reward,
                                   std::vector<std::pair<double, DelayDist>> conditional);

  const RewardDist& reward() const { return reward_; }
  const std::vector<std::pair<double, DelayDist>>& conditionals() const { return conditional_; }
  double mean() const { return reward_.mean(); }
  bool reward_independent() const;

  double sample_reward(Xoshiro256pp& rng) const { return reward_.sample(rng); }
  // `reward` must be a support point of the reward distribution.
  ExtendedDelay sample_delay(double reward, Xoshiro256pp& rng) const;

  // Reward-probability-weighted mixture of the conditional CDFs.
  double marginal_delay_cdf(std::uint64_t g) const;
  // The marginal delay law itself: the shared law when reward-independent,
  // otherwise a Table mixture (requires all conditionals to have finite
  // support enumerations, i.e. no Pareto component).
  DelayDist marginal_delay() const;

  friend bool operator==(const ArmModel& a, const ArmModel& b) {
    return a.reward_ == b.reward_ && a.conditional_ == b.conditional_;
  }

 private:
  ArmModel(RewardDist reward, std::vector<std::pair<double, DelayDist>> conditional)
      : reward_(std::move(reward)), conditional_(std::move(conditional)) {}
  const DelayDist& conditional_for(double reward) const;

  RewardDist reward_;
  std::vector<std::pair<double, DelayDist>> conditional_;  // keyed by support point
};

}  // namespace dmab
