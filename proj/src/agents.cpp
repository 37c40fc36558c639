#include "dmab/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace dmab {

namespace {

// Removes arms flagged by `remove`, keeping order. The cursor keeps pointing
// at the same element, or at whichever element shifts into its slot when that
// element is removed, wrapping at the end of the pass.
void filter_arms(std::vector<int>& arms, std::size_t& cursor,
                 const std::vector<char>& remove) {
  std::size_t write = 0;
  std::size_t new_cursor = 0;
  for (std::size_t read = 0; read < arms.size(); ++read) {
    if (read == cursor) new_cursor = write;
    if (remove[arms[read]]) continue;
    arms[write++] = arms[read];
  }
  arms.resize(write);
  cursor = arms.empty() ? 0 : new_cursor % arms.size();
}

std::vector<int> all_arms(int k) {
  std::vector<int> arms(k);
  for (int i = 0; i < k; ++i) arms[i] = i;
  return arms;
}

}  // namespace

void UcbAgent::reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t) {
  base_reset(k, horizon, radius);
  init_cursor_ = 0;
}

int UcbAgent::choose(std::uint64_t) {
  if (init_cursor_ < k_) {
    const int arm = init_cursor_++;
    counts_.pulls[arm] += 1;
    return arm;
  }
  int best = 0;
  double best_index = ucb_n(0);
  for (int i = 1; i < k_; ++i) {
    const double idx = ucb_n(i);
    if (idx > best_index) {  // ties go to the lowest index
      best_index = idx;
      best = i;
    }
  }
  counts_.pulls[best] += 1;
  return best;
}

void UcbAgent::observe(std::span<const FeedbackEvent> events) { counts_.ingest(events); }

void SeAgent::reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t) {
  base_reset(k, horizon, radius);
  active_ = all_arms(k);
  cursor_ = 0;
  pass_done_ = false;
}

int SeAgent::choose(std::uint64_t) {
  const int arm = active_[cursor_];
  counts_.pulls[arm] += 1;
  if (++cursor_ == active_.size()) {
    cursor_ = 0;
    pass_done_ = true;
  }
  return arm;
}

void SeAgent::observe(std::span<const FeedbackEvent> events) {
  counts_.ingest(events);
  if (pass_done_) {
    eliminate();
    pass_done_ = false;
  }
}

void SeAgent::eliminate() {
  double best_lcb = lcb_n(active_[0]);
  for (std::size_t i = 1; i < active_.size(); ++i)
    best_lcb = std::max(best_lcb, lcb_n(active_[i]));
  std::vector<char> remove(k_, 0);
  for (int arm : active_)
    if (ucb_n(arm) < best_lcb) remove[arm] = 1;
  filter_arms(active_, cursor_, remove);
}

bool SeAgent::is_active(int arm) const {
  return std::find(active_.begin(), active_.end(), arm) != active_.end();
}

void PseAgent::reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t) {
  base_reset(k, horizon, radius);
  active_ = all_arms(k);
  in_phase_ = active_;
  cursor_ = 0;
  phase_ = 1;
  phase_cap_ = static_cast<int>(std::ceil(std::log2(static_cast<double>(horizon))));
  if (phase_cap_ < 1) phase_cap_ = 1;
  threshold_ = pse_observation_threshold(phase_, log_horizon_);
}

int PseAgent::choose(std::uint64_t) {
  const int arm = in_phase_[cursor_];
  counts_.pulls[arm] += 1;
  if (++cursor_ >= in_phase_.size()) cursor_ = 0;
  return arm;
}

void PseAgent::observe(std::span<const FeedbackEvent> events) {
  counts_.ingest(events);
  drop_saturated();
  if (in_phase_.empty()) {
    eliminate();
    if (phase_ < phase_cap_) {
      phase_ += 1;
      threshold_ = pse_observation_threshold(phase_, log_horizon_);
    }
    in_phase_ = active_;
    cursor_ = 0;
  }
}

void PseAgent::drop_saturated() {
  std::vector<char> remove(k_, 0);
  bool any = false;
  for (int arm : in_phase_) {
    if (static_cast<double>(counts_.observations[arm]) >= threshold_) {
      remove[arm] = 1;
      any = true;
    }
  }
  if (any) filter_arms(in_phase_, cursor_, remove);
}

void PseAgent::eliminate() {
  double best_lcb = lcb_n(active_[0]);
  for (std::size_t i = 1; i < active_.size(); ++i)
    best_lcb = std::max(best_lcb, lcb_n(active_[i]));
  std::vector<char> remove(k_, 0);
  for (int arm : active_)
    if (ucb_n(arm) < best_lcb) remove[arm] = 1;
  std::size_t dummy = 0;
  filter_arms(active_, dummy, remove);
}

bool PseAgent::is_active(int arm) const {
  return std::find(active_.begin(), active_.end(), arm) != active_.end();
}

void OpseAgent::reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t) {
  base_reset(k, horizon, radius);
  active_ = all_arms(k);
  cursor_ = 0;
  pass_done_ = false;
}

int OpseAgent::choose(std::uint64_t) {
  const int arm = active_[cursor_];
  counts_.pulls[arm] += 1;
  if (++cursor_ == active_.size()) {
    cursor_ = 0;
    pass_done_ = true;
  }
  return arm;
}

void OpseAgent::observe(std::span<const FeedbackEvent> events) {
  counts_.ingest(events);
  if (pass_done_) {
    eliminate();
    pass_done_ = false;
  }
}

double OpseAgent::pessimistic_mean(int arm) const {
  const auto m = counts_.pulls[arm];
  return m == 0 ? 0.0 : counts_.reward_sums[arm] / static_cast<double>(m);
}

double OpseAgent::optimistic_mean(int arm) const {
  // (m - n)/m + mu_minus, evaluated as one division so the estimator sandwich
  // around the all-samples mean is exact in floating point, not just in R.
  const auto m = counts_.pulls[arm];
  if (m == 0) return 1.0;
  const double missing = static_cast<double>(m - counts_.observations[arm]);
  return (missing + counts_.reward_sums[arm]) / static_cast<double>(m);
}

void OpseAgent::eliminate() {
  // Confidence radius over pulls m, not observations n; every active arm has
  // been pulled at least once by the end of the first pass.
  double best_lcb = pessimistic_mean(active_[0]) - radius(counts_.pulls[active_[0]]);
  for (std::size_t i = 1; i < active_.size(); ++i) {
    const int arm = active_[i];
    best_lcb = std::max(best_lcb, pessimistic_mean(arm) - radius(counts_.pulls[arm]));
  }
  std::vector<char> remove(k_, 0);
  for (int arm : active_)
    if (optimistic_mean(arm) + radius(counts_.pulls[arm]) < best_lcb) remove[arm] = 1;
  filter_arms(active_, cursor_, remove);
}

bool OpseAgent::is_active(int arm) const {
  return std::find(active_.begin(), active_.end(), arm) != active_.end();
}

void UniformAgent::reset(int k, std::uint64_t horizon, RadiusSpec radius, std::uint64_t seed) {
  base_reset(k, horizon, radius);
  rng_.reseed(seed);
}

int UniformAgent::choose(std::uint64_t) {
  const int arm = static_cast<int>(rng_.next_below(static_cast<std::uint64_t>(k_)));
  counts_.pulls[arm] += 1;
  return arm;
}

void UniformAgent::observe(std::span<const FeedbackEvent> events) { counts_.ingest(events); }

std::unique_ptr<Agent> make_agent(std::string_view name) {
  if (name == "ucb") return std::make_unique<UcbAgent>();
  if (name == "se") return std::make_unique<SeAgent>();
  if (name == "pse") return std::make_unique<PseAgent>();
  if (name == "opse") return std::make_unique<OpseAgent>();
  if (name == "uniform") return std::make_unique<UniformAgent>();
  throw std::invalid_argument("unknown agent: " + std::string(name));
}

}  // namespace dmab
