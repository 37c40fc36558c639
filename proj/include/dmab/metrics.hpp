#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Per-run trajectories, cross-run aggregation with standard-error bands, and
// the CSV formats. Floating point is printed with 9 significant digits.

namespace dmab {

struct RunRecord {
  std::string instance;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> checkpoints;  // rounds at which regret was sampled
  std::vector<double> regret_curve;        // cumulative realized-gap sum, nondecreasing
  std::vector<std::uint64_t> final_pulls;         // m per arm at the horizon
  std::vector<std::uint64_t> final_observations;  // n per arm at the horizon
  bool eliminated_optimal = false;
  std::vector<std::int32_t> actions;  // per-round arms; kept only on request
};

struct Aggregate {
  std::string instance;
  std::string algorithm;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> mean;
  std::vector<double> stderr_;  // sample std (n-1 denominator) / sqrt(runs)
  std::uint64_t runs = 0;
  bool degenerate = false;  // single run: stderr reported as 0
  double eliminated_optimal_rate = 0.0;
};

// Checkpoint rounds {every, 2*every, ...} plus the horizon itself.
std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t horizon, std::uint64_t every);

// Pointwise mean and standard error; all records must share instance,
// algorithm and checkpoints.
Aggregate aggregate(const std::vector<RunRecord>& records);

// Per-run CSV: header instance,algorithm,seed,round,cum_regret.
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_runs_csv(std::istream& in);

// Aggregate CSV: header instance,algorithm,round,mean,stderr,runs.
void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& aggregates);
std::vector<Aggregate> read_aggregates_csv(std::istream& in);

// 9-significant-digit float formatting used by all emitters.
std::string format_float(double v);

}  // namespace dmab
