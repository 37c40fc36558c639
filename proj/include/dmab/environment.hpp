#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dmab/distributions.hpp"
#include "dmab/rng.hpp"

// Round-by-round protocol execution: intake of the chosen arm, joint
// (reward, delay) sampling for that arm only, and delivery of anonymized
// feedback. An event generated at round s with delay d is delivered at the
// END of round s + d and is usable from round s + d + 1 on; d = 0 events are
// delivered at the end of their own round. Events within one arrival round
// are ordered by ascending emission round.

namespace dmab {

// What an agent observes: arm index and reward. No round stamp, no delay.
struct FeedbackEvent {
  std::int32_t arm;
  double reward;
  friend bool operator==(const FeedbackEvent& a, const FeedbackEvent& b) {
    return a.arm == b.arm && a.reward == b.reward;
  }
};

class Environment {
 public:
  Environment(std::vector<ArmModel> arms, std::vector<double> gaps, std::uint64_t horizon,
              std::uint64_t seed)
      : arms_(std::move(arms)),
        gaps_(std::move(gaps)),
        horizon_(horizon),
        rng_(seed),
        pending_(horizon + 2),
        pulls_(arms_.size(), 0),
        true_reward_sum_(arms_.size(), 0.0) {
    if (arms_.empty()) throw std::invalid_argument("environment needs at least one arm");
    if (gaps_.size() != arms_.size())
      throw std::invalid_argument("gaps must match the number of arms");
    if (horizon_ == 0) throw std::invalid_argument("horizon must be positive");
  }

  // Plays one round with the given arm; returns the feedback delivered at the
  // end of this round. The returned reference is valid until the next step.
  const std::vector<FeedbackEvent>& step(int arm) {
    if (t_ > horizon_) throw std::logic_error("step past the horizon");
    if (arm < 0 || static_cast<std::size_t>(arm) >= arms_.size())
      throw std::out_of_range("arm index out of range");

    const ArmModel& model = arms_[arm];
    const double r = model.sample_reward(rng_);
    const ExtendedDelay d = model.sample_delay(r, rng_);

    pulls_[arm] += 1;
    true_reward_sum_[arm] += r;
    cum_gap_ += gaps_[arm];

    if (d.is_infinite()) {
      dropped_ += 1;
    } else {
      const std::uint64_t arrival = t_ + d.value();
      if (arrival > horizon_) {
        beyond_horizon_ += 1;  // stays pending; the horizon truncates delivery
      } else {
        pending_[arrival].push_back(FeedbackEvent{arm, r});
        queued_ += 1;
      }
    }

    delivery_.clear();
    delivery_.swap(pending_[t_]);
    queued_ -= delivery_.size();
    delivered_ += delivery_.size();
    t_ += 1;
    return delivery_;
  }

  // Sum of the realized gaps of the chosen arms over completed rounds.
  double pseudo_regret() const { return cum_gap_; }

  std::uint64_t round() const { return t_; }  // next round to play, in [1, T+1]
  std::uint64_t horizon() const { return horizon_; }
  int num_arms() const { return static_cast<int>(arms_.size()); }
  std::uint64_t delivered_count() const { return delivered_; }
  std::uint64_t dropped_count() const { return dropped_; }
  std::uint64_t pending_count() const { return queued_ + beyond_horizon_; }
  bool conserved() const { return delivered_ + pending_count() + dropped_ == t_ - 1; }

  // Full-information side channel for oracles and metrics; agents never see it.
  const std::vector<std::uint64_t>& pulls() const { return pulls_; }
  const std::vector<double>& true_reward_sums() const { return true_reward_sum_; }
  double full_information_mean(int arm) const {
    return pulls_[arm] == 0 ? 0.0 : true_reward_sum_[arm] / static_cast<double>(pulls_[arm]);
  }

 private:
  std::vector<ArmModel> arms_;
  std::vector<double> gaps_;
  std::uint64_t horizon_;
  std::uint64_t t_ = 1;
  Xoshiro256pp rng_;
  std::vector<std::vector<FeedbackEvent>> pending_;  // keyed by arrival round
  std::vector<FeedbackEvent> delivery_;
  std::uint64_t queued_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t beyond_horizon_ = 0;
  double cum_gap_ = 0.0;
  std::vector<std::uint64_t> pulls_;
  std::vector<double> true_reward_sum_;
};

}  // namespace dmab
