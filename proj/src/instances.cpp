#include "dmab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dmab/rng.hpp"

namespace dmab {

double InstanceSpec::min_positive_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (double g : gaps)
    if (g > 0.0) best = std::min(best, g);
  return best;
}

std::vector<DelayDist> InstanceSpec::marginal_delays() const {
  std::vector<DelayDist> out;
  out.reserve(arms.size());
  for (const auto& arm : arms) out.push_back(arm.marginal_delay());
  return out;
}

InstanceSpec finish_instance(std::string name, std::vector<ArmModel> arms,
                             std::string provenance) {
  if (arms.empty()) throw std::invalid_argument("instance needs at least one arm");
  int opt = 0;
  for (std::size_t i = 1; i < arms.size(); ++i)
    if (arms[i].mean() > arms[opt].mean()) opt = static_cast<int>(i);
  std::vector<double> gaps(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) gaps[i] = arms[opt].mean() - arms[i].mean();
  InstanceSpec spec{std::move(name), std::move(arms), opt, std::move(gaps),
                    std::move(provenance)};
  for (std::size_t i = 0; i < spec.arms.size(); ++i) {
    const double expect = spec.arms[spec.optimal_arm].mean() - spec.arms[i].mean();
    if (std::abs(spec.gaps[i] - expect) > 1e-12)
      throw std::logic_error("gaps inconsistent with arm means");
  }
  return spec;
}

InstanceSpec make_fig1(int k, std::uint64_t delay, std::uint64_t mean_seed) {
  if (k < 1) throw std::invalid_argument("fig1 needs at least one arm");
  Xoshiro256pp rng(mix_seed(mean_seed, 0));
  std::vector<ArmModel> arms;
  arms.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double mean = rng.next_in(0.25, 0.75);
    arms.push_back(ArmModel::independent(RewardDist::bernoulli(mean), DelayDist::fixed(delay)));
  }
  return finish_instance("fig1", std::move(arms),
                         "fixed-delay Bernoulli sweep, means uniform in [0.25, 0.75]");
}

InstanceSpec make_ucb_adversarial(int k, std::uint64_t delay, std::uint64_t index_seed) {
  if (k < 2) throw std::invalid_argument("adversarial instance needs at least two arms");
  if (delay < static_cast<std::uint64_t>(k))
    throw std::invalid_argument("adversarial instance requires delay >= number of arms");
  Xoshiro256pp rng(mix_seed(index_seed, 0));
  const int lower = (k + 1) / 2;  // optimal index in the upper half {ceil(K/2) .. K-1}
  const int opt = lower + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k - lower)));
  std::vector<ArmModel> arms;
  arms.reserve(k);
  for (int i = 0; i < k; ++i) {
    auto reward = (i == opt) ? RewardDist::point_mass(1.0) : RewardDist::bernoulli(0.5);
    arms.push_back(ArmModel::independent(std::move(reward), DelayDist::fixed(delay)));
  }
  return finish_instance("ucb-adv", std::move(arms),
                         "fixed-delay instance with a unit-mean arm hidden in the upper half");
}

InstanceSpec make_pareto(double delta, double alpha1, double alpha2) {
  if (delta < 0.0 || delta > 0.6) throw std::invalid_argument("pareto gap must lie in [0, 0.6]");
  std::vector<ArmModel> arms;
  arms.push_back(ArmModel::independent(RewardDist::bernoulli(0.4), DelayDist::pareto(alpha1)));
  arms.push_back(
      ArmModel::independent(RewardDist::bernoulli(0.4 + delta), DelayDist::pareto(alpha2)));
  return finish_instance("fig2", std::move(arms), "two-arm Pareto-delay gap sweep");
}

InstanceSpec make_packet_loss(int k, double p_opt, std::uint64_t gap_seed) {
  if (k < 2) throw std::invalid_argument("packet-loss instance needs at least two arms");
  if (p_opt <= 0.0 || p_opt > 1.0)
    throw std::invalid_argument("observation probability must lie in (0, 1]");
  Xoshiro256pp rng(mix_seed(gap_seed, 0));
  std::vector<ArmModel> arms;
  arms.reserve(k);
  // Base mean 0.6 for the optimal arm (index 0); paper leaves it unstated.
  arms.push_back(
      ArmModel::independent(RewardDist::bernoulli(0.6), DelayDist::packet_loss(p_opt)));
  for (int i = 1; i < k; ++i) {
    const double gap = rng.next_in(0.15, 0.25);
    arms.push_back(
        ArmModel::independent(RewardDist::bernoulli(0.6 - gap), DelayDist::packet_loss(1.0)));
  }
  return finish_instance("fig3", std::move(arms),
                         "packet loss: best arm observed w.p. p_opt, others always");
}

InstanceSpec make_reward_dependent_bias(int k, std::uint64_t d_big, std::uint64_t gap_seed) {
  if (k < 2) throw std::invalid_argument("reward-dependent instance needs at least two arms");
  Xoshiro256pp rng(mix_seed(gap_seed, 0));
  std::vector<ArmModel> arms;
  arms.reserve(k);
  arms.push_back(ArmModel::reward_dependent(
      RewardDist::bernoulli(0.6),
      {{0.0, DelayDist::fixed(0)}, {1.0, DelayDist::fixed(d_big)}}));
  for (int i = 1; i < k; ++i) {
    const double gap = rng.next_in(0.15, 0.25);
    arms.push_back(ArmModel::reward_dependent(
        RewardDist::bernoulli(0.6 - gap),
        {{0.0, DelayDist::fixed(d_big)}, {1.0, DelayDist::fixed(0)}}));
  }
  return finish_instance("fig4", std::move(arms),
                         "biased delays: reward 1 of the best arm and reward 0 of the others "
                         "arrive d_big rounds late");
}

InstanceSpec make_dep_lower(DepLowerVariant variant, double delta, std::uint64_t d_tilde) {
  if (!(delta > 0.0 && delta <= 0.5))
    throw std::invalid_argument("dep-lower gap must lie in (0, 1/2]");

  const double slow = 4.0 * delta / (1.0 + 2.0 * delta);
  auto slow_or_now = DelayDist::table({{ExtendedDelay::finite(d_tilde), slow},
                                       {ExtendedDelay::finite(0), 1.0 - slow}});

  std::vector<ArmModel> arms;
  arms.push_back(ArmModel::independent(
      RewardDist::bernoulli(0.5),
      DelayDist::table({{ExtendedDelay::finite(d_tilde), 1.0 - 2.0 * delta},
                        {ExtendedDelay::finite(0), 2.0 * delta}})));
  if (variant == DepLowerVariant::kI1) {
    arms.push_back(ArmModel::reward_dependent(
        RewardDist::bernoulli(0.5 - delta),
        {{0.0, slow_or_now}, {1.0, DelayDist::fixed(0)}}));
  } else {
    arms.push_back(ArmModel::reward_dependent(
        RewardDist::bernoulli(0.5 + delta),
        {{0.0, DelayDist::fixed(0)}, {1.0, slow_or_now}}));
  }
  return finish_instance(variant == DepLowerVariant::kI1 ? "dep-lower-i1" : "dep-lower-i2",
                         std::move(arms),
                         "indistinguishable reward-dependent pair: Pr(d=0)=1-2*delta and "
                         "Pr(r=1|d=0)=1/2 under both variants");
}

InstanceSpec make_twopoint_lower(const std::vector<double>& gaps, std::uint64_t d_tilde,
                                 double q, std::uint64_t perm_seed) {
  if (gaps.empty()) throw std::invalid_argument("twopoint instance needs gaps");
  for (double g : gaps)
    if (g < 0.0 || g > 0.25)
      throw std::invalid_argument("twopoint gaps must lie in [0, 1/4]");
  if (q <= 0.0 || q > 1.0) throw std::invalid_argument("twopoint q must lie in (0, 1]");

  std::vector<double> order(gaps);
  Xoshiro256pp rng(mix_seed(perm_seed, 0));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);

  std::vector<ArmModel> arms;
  arms.reserve(order.size());
  for (double gap : order)
    arms.push_back(ArmModel::independent(RewardDist::bernoulli(0.5 - gap),
                                         DelayDist::two_point(d_tilde, q)));
  return finish_instance("twopoint", std::move(arms),
                         "shared two-point delays: d_tilde w.p. q, never otherwise");
}

}  // namespace dmab
