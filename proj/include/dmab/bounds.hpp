#pragma once

#include <cstdint>
#include <vector>

#include "dmab/distributions.hpp"

// Closed-form regret-bound right-hand sides for the SE / PSE / OPSE theorems,
// evaluated on a concrete instance. Quantile minimizations run over the grid
// q in {0.01, 0.02, ..., 1.00} per arm. Natural log convention throughout.
// A bound can be +infinity (e.g. packet loss with no feasible quantile).

namespace dmab {

enum class BoundKind {
  kSePerArm,          // per-arm quantile vector; 40 log T terms, log K penalty
  kSeSingleQuantile,  // one shared quantile; 325 log T terms, 4 * max_i d_i(q)
  kPse,               // 290 log T / (q_i * gap_i) + log T * log K penalty
  kOpse,              // 1166 log T / gap_i + 4 log K delay terms at fixed quantiles
};

// gaps[i] = mean(best) - mean(i); exactly the optimal arm(s) have gap 0.
// delays[i] is arm i's marginal delay law. All-zero gaps give 0 by convention.
double bound_value(BoundKind kind, const std::vector<double>& gaps,
                   const std::vector<DelayDist>& delays, std::uint64_t horizon);

}  // namespace dmab
