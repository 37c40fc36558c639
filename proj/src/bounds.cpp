#include "dmab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGridSize = 100;  // q in {0.01, ..., 1.00}

double grid_q(int idx) { return static_cast<double>(idx + 1) / 100.0; }

double delay_or_inf(const DelayDist& dist, double q) {
  const ExtendedDelay d = dist.quantile(q);
  return d.is_infinite() ? kInf : static_cast<double>(d.value());
}

std::vector<double> quantiles_on_grid(const DelayDist& dist) {
  std::vector<double> out(kGridSize);
  for (int g = 0; g < kGridSize; ++g) out[g] = delay_or_inf(dist, grid_q(g));
  return out;
}

int optimal_index(const std::vector<double>& gaps) {
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] == 0.0) return static_cast<int>(i);
  throw std::invalid_argument("gaps must contain a zero entry for the optimal arm");
}

// Minimize sum_i coeff_i / q_i + penalty_weight * max_i penalty_i(q_i) over
// the grid, one q per arm. penalty_i is nondecreasing in q, coeff_i / q_i is
// decreasing, so for a cap M on the max term the best q_i is the largest grid
// point with penalty_i(q_i) <= M; enumerating realized penalty values as caps
// covers the optimum exactly.
double minimize_separable(const std::vector<double>& coeffs,
                          const std::vector<std::vector<double>>& penalties,
                          double penalty_weight) {
  const std::size_t arms = coeffs.size();
  if (arms == 0) return 0.0;

  std::vector<double> caps;
  for (const auto& pen : penalties)
    for (double v : pen)
      if (v < kInf) caps.push_back(v);
  std::sort(caps.begin(), caps.end());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());

  double best = kInf;
  for (double cap : caps) {
    double sum = 0.0;
    double realized = 0.0;
    bool feasible = true;
    for (std::size_t i = 0; i < arms; ++i) {
      const auto& pen = penalties[i];
      // Largest grid index with pen <= cap (pen is nondecreasing).
      int lo = 0, hi = kGridSize - 1, pick = -1;
      while (lo <= hi) {
        const int mid = (lo + hi) / 2;
        if (pen[mid] <= cap) {
          pick = mid;
          lo = mid + 1;
        } else {
          hi = mid - 1;
        }
      }
      if (pick < 0) {
        feasible = false;
        break;
      }
      sum += coeffs[i] / grid_q(pick);
      realized = std::max(realized, pen[pick]);
    }
    if (!feasible) continue;
    best = std::min(best, sum + penalty_weight * realized);
  }
  return best;
}

double se_per_arm(const std::vector<double>& gaps, const std::vector<DelayDist>& delays,
                  double log_t, int opt) {
  const int k = static_cast<int>(gaps.size());
  const auto opt_grid = quantiles_on_grid(delays[opt]);
  const double log_k = std::log(static_cast<double>(k));

  std::vector<int> subopt;
  for (int i = 0; i < k; ++i)
    if (i != opt && gaps[i] > 0.0) subopt.push_back(i);
  if (subopt.empty()) return 0.0;

  std::vector<std::vector<double>> arm_grids;
  arm_grids.reserve(subopt.size());
  for (int i : subopt) arm_grids.push_back(quantiles_on_grid(delays[i]));

  double best = kInf;
  for (int gstar = 0; gstar < kGridSize; ++gstar) {
    const double q_star = grid_q(gstar);
    const double d_star = opt_grid[gstar];
    if (d_star == kInf) continue;

    std::vector<double> coeffs(subopt.size());
    std::vector<std::vector<double>> penalties(subopt.size());
    double star_sum = 0.0;
    for (std::size_t j = 0; j < subopt.size(); ++j) {
      const double gap = gaps[subopt[j]];
      coeffs[j] = 40.0 * log_t / gap;
      star_sum += 40.0 * log_t / (gap * q_star);
      auto pen = arm_grids[j];
      for (double& v : pen) v = (v == kInf) ? kInf : (v + d_star) * gap;
      penalties[j] = std::move(pen);
    }
    const double value = star_sum + minimize_separable(coeffs, penalties, log_k);
    best = std::min(best, value);
  }
  return best;
}

double se_single_quantile(const std::vector<double>& gaps, const std::vector<DelayDist>& delays,
                          double log_t) {
  bool any_gap = false;
  for (double g : gaps) any_gap |= g > 0.0;
  if (!any_gap) return 0.0;

  double best = kInf;
  for (int g = 0; g < kGridSize; ++g) {
    const double q = grid_q(g);
    double d_max = 0.0;
    bool feasible = true;
    for (const auto& dist : delays) {  // max over every arm, optimal included
      const double d = delay_or_inf(dist, q);
      if (d == kInf) {
        feasible = false;
        break;
      }
      d_max = std::max(d_max, d);
    }
    if (!feasible) continue;
    double sum = 0.0;
    for (double gap : gaps)
      if (gap > 0.0) sum += 325.0 * log_t / (q * gap);
    best = std::min(best, sum + 4.0 * d_max);
  }
  return best;
}

double pse(const std::vector<double>& gaps, const std::vector<DelayDist>& delays, double log_t,
           int opt) {
  const int k = static_cast<int>(gaps.size());
  const double log_k = std::log(static_cast<double>(k));

  std::vector<double> coeffs;
  std::vector<std::vector<double>> penalties;
  for (int i = 0; i < k; ++i) {
    if (i == opt || gaps[i] <= 0.0) continue;
    coeffs.push_back(290.0 * log_t / gaps[i]);
    auto pen = quantiles_on_grid(delays[i]);
    for (double& v : pen) v = (v == kInf) ? kInf : v * gaps[i];
    penalties.push_back(std::move(pen));
  }
  if (coeffs.empty()) return 0.0;
  return minimize_separable(coeffs, penalties, log_t * log_k);
}

double opse(const std::vector<double>& gaps, const std::vector<DelayDist>& delays, double log_t,
            int opt) {
  const int k = static_cast<int>(gaps.size());
  const double log_k = std::log(static_cast<double>(k));

  double sum = 0.0;
  double d_max = 0.0;
  double gap_min = kInf;
  bool any = false;
  for (int i = 0; i < k; ++i) {
    if (i == opt || gaps[i] <= 0.0) continue;
    any = true;
    gap_min = std::min(gap_min, gaps[i]);
    sum += 1166.0 * log_t / gaps[i];
    d_max = std::max(d_max, delay_or_inf(delays[i], 1.0 - gaps[i] / 4.0));
  }
  if (!any) return 0.0;
  const double d_opt = delay_or_inf(delays[opt], 1.0 - gap_min / 4.0);
  return sum + 4.0 * log_k * (d_max + d_opt);
}

}  // namespace

double bound_value(BoundKind kind, const std::vector<double>& gaps,
                   const std::vector<DelayDist>& delays, std::uint64_t horizon) {
  if (gaps.size() != delays.size())
    throw std::invalid_argument("gaps and delay laws must have equal length");
  if (gaps.empty()) throw std::invalid_argument("bound needs at least one arm");
  for (double g : gaps)
    if (!(g >= 0.0)) throw std::invalid_argument("gaps must be nonnegative");
  bool all_zero = true;
  for (double g : gaps) all_zero &= g == 0.0;
  if (all_zero) return 0.0;

  const int opt = optimal_index(gaps);
  const double log_t = std::log(static_cast<double>(horizon));
  switch (kind) {
    case BoundKind::kSePerArm:
      return se_per_arm(gaps, delays, log_t, opt);
    case BoundKind::kSeSingleQuantile:
      return se_single_quantile(gaps, delays, log_t);
    case BoundKind::kPse:
      return pse(gaps, delays, log_t, opt);
    case BoundKind::kOpse:
      return opse(gaps, delays, log_t, opt);
  }
  throw std::invalid_argument("unknown bound kind");
}

}  // namespace dmab
