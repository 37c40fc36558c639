#include "dmab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dmab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

constexpr double kProbSumTol = 1e-12;

}  // namespace

RewardDist RewardDist::bernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, "Bernoulli p must lie in [0,1]");
  return RewardDist(Kind::kBernoulli, p);
}

RewardDist RewardDist::point_mass(double v) {
  require(v >= 0.0 && v <= 1.0, "PointMass value must lie in [0,1]");
  return RewardDist(Kind::kPointMass, v);
}

std::vector<double> RewardDist::support() const {
  if (kind_ == Kind::kPointMass) return {param_};
  return {0.0, 1.0};
}

double RewardDist::sample(Xoshiro256pp& rng) const {
  const double u = rng.next_unit();
  if (kind_ == Kind::kPointMass) return param_;
  return u < param_ ? 1.0 : 0.0;
}

DelayDist DelayDist::fixed(std::uint64_t d) {
  DelayDist out;
  out.kind_ = Kind::kFixed;
  out.d_ = d;
  return out;
}

DelayDist DelayDist::packet_loss(double p) {
  require(p >= 0.0 && p <= 1.0, "packet-loss p must lie in [0,1]");
  DelayDist out;
  out.kind_ = Kind::kPacketLoss;
  out.p_ = p;
  return out;
}

DelayDist DelayDist::two_point(std::uint64_t d_tilde, double q) {
  require(q >= 0.0 && q <= 1.0, "two-point q must lie in [0,1]");
  DelayDist out;
  out.kind_ = Kind::kTwoPoint;
  out.d_ = d_tilde;
  out.p_ = q;
  return out;
}

DelayDist DelayDist::pareto(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), "Pareto alpha must be positive");
  DelayDist out;
  out.kind_ = Kind::kPareto;
  out.alpha_ = alpha;
  return out;
}

DelayDist DelayDist::table(std::vector<TableEntry> entries) {
  double sum = 0.0;
  for (const auto& e : entries) {
    require(e.prob >= 0.0 && e.prob <= 1.0, "table entry probability must lie in [0,1]");
    sum += e.prob;
  }
  require(std::abs(sum - 1.0) <= kProbSumTol, "table probabilities must sum to 1");
  std::erase_if(entries, [](const TableEntry& e) { return e.prob == 0.0; });
  require(!entries.empty(), "table needs at least one entry with positive probability");
  std::sort(entries.begin(), entries.end(),
            [](const TableEntry& a, const TableEntry& b) { return a.delay < b.delay; });
  for (std::size_t i = 1; i < entries.size(); ++i)
    require(entries[i - 1].delay != entries[i].delay, "duplicate table delay entry");
  DelayDist out;
  out.kind_ = Kind::kTable;
  out.entries_ = std::move(entries);
  return out;
}

ExtendedDelay DelayDist::sample(Xoshiro256pp& rng) const {
  const double u = rng.next_unit();
  switch (kind_) {
    case Kind::kFixed:
      return ExtendedDelay::finite(d_);
    case Kind::kPacketLoss:
      return u < p_ ? ExtendedDelay::finite(0) : ExtendedDelay::infinity();
    case Kind::kTwoPoint:
      return u < p_ ? ExtendedDelay::finite(d_) : ExtendedDelay::infinity();
    case Kind::kPareto: {
      // Inverse CDF of the continuous law, then ceiling; 1-u in (0,1].
      const double x = std::pow(1.0 - u, -1.0 / alpha_);
      if (!(x < 0x1p62)) return ExtendedDelay::finite(static_cast<std::uint64_t>(1) << 62);
      const auto d = static_cast<std::uint64_t>(std::ceil(x));
      return ExtendedDelay::finite(d < 1 ? 1 : d);
    }
    case Kind::kTable: {
      double cum = 0.0;
      for (const auto& e : entries_) {
        cum += e.prob;
        if (u < cum) return e.delay;
      }
      return entries_.back().delay;
    }
  }
  return ExtendedDelay::infinity();
}

double DelayDist::cdf(std::uint64_t g) const {
  switch (kind_) {
    case Kind::kFixed:
      return g >= d_ ? 1.0 : 0.0;
    case Kind::kPacketLoss:
      return p_;
    case Kind::kTwoPoint:
      return g >= d_ ? p_ : 0.0;
    case Kind::kPareto:
      return g == 0 ? 0.0 : 1.0 - std::pow(static_cast<double>(g), -alpha_);
    case Kind::kTable: {
      // Same left-to-right summation order as quantile(), so the two agree.
      double cum = 0.0;
      for (const auto& e : entries_) {
        if (e.delay.is_infinite() || e.delay.value() > g) break;
        cum += e.prob;
      }
      return cum;
    }
  }
  return 0.0;
}

ExtendedDelay DelayDist::quantile(double q) const {
  require(q > 0.0 && q <= 1.0, "quantile level must lie in (0,1]");
  switch (kind_) {
    case Kind::kFixed:
      return ExtendedDelay::finite(d_);
    case Kind::kPacketLoss:
      return q <= p_ ? ExtendedDelay::finite(0) : ExtendedDelay::infinity();
    case Kind::kTwoPoint:
      return q <= p_ ? ExtendedDelay::finite(d_) : ExtendedDelay::infinity();
    case Kind::kPareto: {
      if (q == 1.0) return ExtendedDelay::infinity();  // cdf(g) < 1 for every finite g
      // Smallest integer g >= 1 with 1 - g^(-alpha) >= q; solve then fix up
      // against the exact cdf to absorb pow() rounding.
      const double raw = std::pow(1.0 - q, -1.0 / alpha_);
      auto g = static_cast<std::uint64_t>(std::ceil(raw - 1e-9));
      if (g < 1) g = 1;
      while (cdf(g) < q) ++g;
      while (g > 1 && cdf(g - 1) >= q) --g;
      return ExtendedDelay::finite(g);
    }
    case Kind::kTable: {
      double cum = 0.0;
      for (const auto& e : entries_) {
        cum += e.prob;
        if (cum >= q) return e.delay;
      }
      return ExtendedDelay::infinity();
    }
  }
  return ExtendedDelay::infinity();
}

ExtendedDelay DelayDist::finite_support_max() const {
  switch (kind_) {
    case Kind::kFixed:
      return ExtendedDelay::finite(d_);
    case Kind::kPacketLoss:
      return ExtendedDelay::finite(0);
    case Kind::kTwoPoint:
      return ExtendedDelay::finite(d_);
    case Kind::kPareto:
      return ExtendedDelay::infinity();
    case Kind::kTable: {
      ExtendedDelay best = ExtendedDelay::finite(0);
      bool any = false;
      for (const auto& e : entries_) {
        if (!e.delay.is_infinite()) {
          best = e.delay;
          any = true;
        }
      }
      return any ? best : ExtendedDelay::finite(0);
    }
  }
  return ExtendedDelay::finite(0);
}

double DelayDist::infinite_mass() const {
  switch (kind_) {
    case Kind::kFixed:
      return 0.0;
    case Kind::kPacketLoss:
      return 1.0 - p_;
    case Kind::kTwoPoint:
      return 1.0 - p_;
    case Kind::kPareto:
      return 0.0;
    case Kind::kTable: {
      double mass = 0.0;
      for (const auto& e : entries_)
        if (e.delay.is_infinite()) mass += e.prob;
      return mass;
    }
  }
  return 0.0;
}

bool operator==(const DelayDist& a, const DelayDist& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case DelayDist::Kind::kFixed:
      return a.d_ == b.d_;
    case DelayDist::Kind::kPacketLoss:
      return a.p_ == b.p_;
    case DelayDist::Kind::kTwoPoint:
      return a.d_ == b.d_ && a.p_ == b.p_;
    case DelayDist::Kind::kPareto:
      return a.alpha_ == b.alpha_;
    case DelayDist::Kind::kTable:
      return a.entries_ == b.entries_;
  }
  return false;
}

ArmModel ArmModel::independent(RewardDist reward, DelayDist delay) {
  std::vector<std::pair<double, DelayDist>> conditional;
  for (double r : reward.support()) conditional.emplace_back(r, delay);
  return ArmModel(std::move(reward), std::move(conditional));
}

ArmModel ArmModel::reward_dependent(RewardDist reward,
                                    std::vector<std::pair<double, DelayDist>> conditional) {
  const auto support = reward.support();
  require(conditional.size() == support.size(),
          "arm model needs exactly one delay law per reward support point");
  // Canonical order: by support point.
  std::sort(conditional.begin(), conditional.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto sorted_support = support;
  std::sort(sorted_support.begin(), sorted_support.end());
  for (std::size_t i = 0; i < conditional.size(); ++i)
    require(conditional[i].first == sorted_support[i],
            "delay law attached to a value outside the reward support");
  return ArmModel(std::move(reward), std::move(conditional));
}

bool ArmModel::reward_independent() const {
  for (std::size_t i = 1; i < conditional_.size(); ++i)
    if (!(conditional_[i].second == conditional_[0].second)) return false;
  return true;
}

const DelayDist& ArmModel::conditional_for(double reward) const {
  for (const auto& [r, dist] : conditional_)
    if (r == reward) return dist;
  throw std::invalid_argument("reward value is not a support point of this arm");
}

ExtendedDelay ArmModel::sample_delay(double reward, Xoshiro256pp& rng) const {
  return conditional_for(reward).sample(rng);
}

double ArmModel::marginal_delay_cdf(std::uint64_t g) const {
  if (reward_independent()) return conditional_[0].second.cdf(g);
  double cdf = 0.0;
  for (const auto& [r, dist] : conditional_) {
    const double pr = reward_.kind() == RewardDist::Kind::kPointMass
                          ? 1.0
                          : (r == 1.0 ? reward_.param() : 1.0 - reward_.param());
    cdf += pr * dist.cdf(g);
  }
  return cdf;
}

DelayDist ArmModel::marginal_delay() const {
  if (reward_independent()) return conditional_[0].second;
  // Mix the conditionals into one table; every component must enumerate.
  std::vector<DelayDist::TableEntry> mixed;
  for (const auto& [r, dist] : conditional_) {
    const double pr = reward_.kind() == RewardDist::Kind::kPointMass
                          ? 1.0
                          : (r == 1.0 ? reward_.param() : 1.0 - reward_.param());
    if (pr == 0.0) continue;
    std::vector<DelayDist::TableEntry> part;
    switch (dist.kind()) {
      case DelayDist::Kind::kFixed:
        part.push_back({ExtendedDelay::finite(dist.fixed_value()), 1.0});
        break;
      case DelayDist::Kind::kPacketLoss:
        part.push_back({ExtendedDelay::finite(0), dist.prob_param()});
        part.push_back({ExtendedDelay::infinity(), 1.0 - dist.prob_param()});
        break;
      case DelayDist::Kind::kTwoPoint:
        part.push_back({ExtendedDelay::finite(dist.fixed_value()), dist.prob_param()});
        part.push_back({ExtendedDelay::infinity(), 1.0 - dist.prob_param()});
        break;
      case DelayDist::Kind::kTable:
        part = dist.entries();
        break;
      case DelayDist::Kind::kPareto:
        throw std::invalid_argument(
            "marginal delay of a reward-dependent arm with Pareto components is not enumerable");
    }
    for (const auto& e : part) mixed.push_back({e.delay, pr * e.prob});
  }
  std::sort(mixed.begin(), mixed.end(),
            [](const auto& a, const auto& b) { return a.delay < b.delay; });
  std::vector<DelayDist::TableEntry> merged;
  for (const auto& e : mixed) {
    if (!merged.empty() && merged.back().delay == e.delay)
      merged.back().prob += e.prob;
    else
      merged.push_back(e);
  }
  // Compensate mixture rounding so table() accepts the mass.
  double sum = 0.0;
  for (const auto& e : merged) sum += e.prob;
  if (sum != 0.0 && std::abs(sum - 1.0) > 0 && std::abs(sum - 1.0) < 1e-9)
    for (auto& e : merged) e.prob /= sum;
  return DelayDist::table(std::move(merged));
}

}  // namespace dmab
