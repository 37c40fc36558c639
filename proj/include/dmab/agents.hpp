#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmab/environment.hpp"
#include "dmab/rng.hpp"

// The agents: UCB, SE, PSE and OPSE behind one interface, plus a uniform
// baseline. Contract per round t = 1..T: choose(t) once, then observe() once
// with whatever feedback the environment delivered at the end of the round.
// Natural log throughout ("log T" is ln T).

namespace dmab {

// Confidence half-width sqrt(scale * log T / count), or sqrt(scale / count)
// when log_t is off (with scale 2 that is the preset figures' sqrt(2/n)).
struct RadiusSpec {
  double scale = 2.0;
  bool log_t = true;

  double coefficient(std::uint64_t horizon) const {
    return log_t ? scale * std::log(static_cast<double>(horizon)) : scale;
  }
  friend bool operator==(const RadiusSpec& a, const RadiusSpec& b) {
    return a.scale == b.scale && a.log_t == b.log_t;
  }
};

// Per-arm bookkeeping shared by all agents: pulls m(i), observed feedback
// count n(i) and observed reward sums. n(i) <= m(i) always.
struct CommonCounts {
  std::vector<std::uint64_t> pulls;         // m(i)
  std::vector<std::uint64_t> observations;  // n(i)
  std::vector<double> reward_sums;          // sum of observed rewards

  void reset(int k) {
    pulls.assign(k, 0);
    observations.assign(k, 0);
    reward_sums.assign(k, 0.0);
  }
  void ingest(std::span<const FeedbackEvent> events) {
    for (const auto& e : events) {
      observations[e.arm] += 1;
      reward_sums[e.arm] += e.reward;
    }
  }
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual void reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) = 0;
  virtual int choose(std::uint64_t t) = 0;
  virtual void observe(std::span<const FeedbackEvent> events) = 0;
  virtual std::string_view name() const = 0;
  virtual bool is_active(int arm) const { (void)arm; return true; }

  const CommonCounts& counts() const { return counts_; }

 protected:
  void base_reset(int k, std::uint64_t horizon, RadiusSpec radius) {
    k_ = k;
    horizon_ = horizon;
    radius_coeff_ = radius.coefficient(horizon);
    log_horizon_ = std::log(static_cast<double>(horizon));
    counts_.reset(k);
  }
  double radius(std::uint64_t count) const {
    return std::sqrt(radius_coeff_ / static_cast<double>(count < 1 ? 1 : count));
  }
  // Observed mean; optimistic default 1 for arms without feedback.
  double mean_or(int arm, double when_empty) const {
    const auto n = counts_.observations[arm];
    return n == 0 ? when_empty : counts_.reward_sums[arm] / static_cast<double>(n);
  }
  double ucb_n(int arm) const { return mean_or(arm, 1.0) + radius(counts_.observations[arm]); }
  double lcb_n(int arm) const { return mean_or(arm, 0.0) - radius(counts_.observations[arm]); }

  int k_ = 0;
  std::uint64_t horizon_ = 0;
  double radius_coeff_ = 0.0;
  double log_horizon_ = 0.0;
  CommonCounts counts_;
};

class UcbAgent final : public Agent {
 public:
  void reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) override;
  int choose(std::uint64_t t) override;
  void observe(std::span<const FeedbackEvent> events) override;
  std::string_view name() const override { return "ucb"; }

  double index_of(int arm) const { return ucb_n(arm); }

 private:
  int init_cursor_ = 0;
};

class SeAgent final : public Agent {
 public:
  void reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) override;
  int choose(std::uint64_t t) override;
  void observe(std::span<const FeedbackEvent> events) override;
  std::string_view name() const override { return "se"; }
  bool is_active(int arm) const override;

  const std::vector<int>& active() const { return active_; }

 private:
  void eliminate();

  std::vector<int> active_;
  std::size_t cursor_ = 0;
  bool pass_done_ = false;
};

// Exit threshold for phase `phase` (>= 1): 16 * log T / eps^2, eps = 2^-phase.
inline double pse_observation_threshold(int phase, double log_horizon) {
  return 16.0 * log_horizon * std::pow(4.0, phase);
}

class PseAgent final : public Agent {
 public:
  void reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) override;
  int choose(std::uint64_t t) override;
  void observe(std::span<const FeedbackEvent> events) override;
  std::string_view name() const override { return "pse"; }
  bool is_active(int arm) const override;

  const std::vector<int>& active() const { return active_; }
  const std::vector<int>& in_phase() const { return in_phase_; }
  int phase() const { return phase_; }

 private:
  void eliminate();
  void drop_saturated();

  std::vector<int> active_;    // S
  std::vector<int> in_phase_;  // S_l
  std::size_t cursor_ = 0;
  int phase_ = 1;
  int phase_cap_ = 1;
  double threshold_ = 0.0;
};

class OpseAgent final : public Agent {
 public:
  void reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) override;
  int choose(std::uint64_t t) override;
  void observe(std::span<const FeedbackEvent> events) override;
  std::string_view name() const override { return "opse"; }
  bool is_active(int arm) const override;

  const std::vector<int>& active() const { return active_; }
  // Observed-reward mean with missing feedback imputed as 0 / as 1.
  double pessimistic_mean(int arm) const;
  double optimistic_mean(int arm) const;

 private:
  void eliminate();

  std::vector<int> active_;
  std::size_t cursor_ = 0;
  bool pass_done_ = false;
};

// Baseline that pulls uniformly at random; used by metrics checks.
class UniformAgent final : public Agent {
 public:
  void reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) override;
  int choose(std::uint64_t t) override;
  void observe(std::span<const FeedbackEvent> events) override;
  std::string_view name() const override { return "uniform"; }

 private:
  Xoshiro256pp rng_;
};

// Known agent names: ucb, se, pse, opse, uniform.
std::unique_ptr<Agent> make_agent(std::string_view name);

}  // namespace dmab
