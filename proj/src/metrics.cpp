#include "dmab/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dmab {

std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t horizon, std::uint64_t every) {
  if (every < 1 || every > horizon)
    throw std::invalid_argument("checkpoint spacing must lie in [1, horizon]");
  std::vector<std::uint64_t> rounds;
  for (std::uint64_t r = every; r <= horizon; r += every) rounds.push_back(r);
  if (rounds.empty() || rounds.back() != horizon) rounds.push_back(horizon);
  return rounds;
}

Aggregate aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("nothing to aggregate");
  const auto& first = records.front();
  for (const auto& r : records) {
    if (r.instance != first.instance || r.algorithm != first.algorithm ||
        r.checkpoints != first.checkpoints)
      throw std::invalid_argument("aggregate over mixed run configurations");
  }

  const std::size_t points = first.checkpoints.size();
  const auto n = static_cast<double>(records.size());
  Aggregate agg;
  agg.instance = first.instance;
  agg.algorithm = first.algorithm;
  agg.checkpoints = first.checkpoints;
  agg.runs = records.size();
  agg.degenerate = records.size() == 1;
  agg.mean.resize(points, 0.0);
  agg.stderr_.resize(points, 0.0);

  for (std::size_t p = 0; p < points; ++p) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.regret_curve[p];
    agg.mean[p] = sum / n;
  }
  if (!agg.degenerate) {
    for (std::size_t p = 0; p < points; ++p) {
      double ss = 0.0;
      for (const auto& r : records) {
        const double d = r.regret_curve[p] - agg.mean[p];
        ss += d * d;
      }
      agg.stderr_[p] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
  }
  std::size_t eliminated = 0;
  for (const auto& r : records) eliminated += r.eliminated_optimal ? 1 : 0;
  agg.eliminated_optimal_rate = static_cast<double>(eliminated) / n;
  return agg;
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "instance,algorithm,seed,round,cum_regret\n";
  for (const auto& r : records)
    for (std::size_t p = 0; p < r.checkpoints.size(); ++p)
      out << r.instance << ',' << r.algorithm << ',' << r.seed << ',' << r.checkpoints[p]
          << ',' << format_float(r.regret_curve[p]) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "instance,algorithm,seed,round,cum_regret")
    throw std::invalid_argument("bad runs CSV header");
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw std::invalid_argument("bad runs CSV row: " + line);
    const auto seed = static_cast<std::uint64_t>(std::stoull(f[2]));
    if (records.empty() || records.back().instance != f[0] ||
        records.back().algorithm != f[1] || records.back().seed != seed) {
      RunRecord r;
      r.instance = f[0];
      r.algorithm = f[1];
      r.seed = seed;
      records.push_back(std::move(r));
    }
    records.back().checkpoints.push_back(std::stoull(f[3]));
    records.back().regret_curve.push_back(std::stod(f[4]));
  }
  return records;
}

void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  out << "instance,algorithm,round,mean,stderr,runs\n";
  for (const auto& a : aggregates)
    for (std::size_t p = 0; p < a.checkpoints.size(); ++p)
      out << a.instance << ',' << a.algorithm << ',' << a.checkpoints[p] << ','
          << format_float(a.mean[p]) << ',' << format_float(a.stderr_[p]) << ',' << a.runs
          << '\n';
}

std::vector<Aggregate> read_aggregates_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "instance,algorithm,round,mean,stderr,runs")
    throw std::invalid_argument("bad aggregate CSV header");
  std::vector<Aggregate> aggregates;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::invalid_argument("bad aggregate CSV row: " + line);
    if (aggregates.empty() || aggregates.back().instance != f[0] ||
        aggregates.back().algorithm != f[1]) {
      Aggregate a;
      a.instance = f[0];
      a.algorithm = f[1];
      a.runs = std::stoull(f[5]);
      aggregates.push_back(std::move(a));
    }
    aggregates.back().checkpoints.push_back(std::stoull(f[2]));
    aggregates.back().mean.push_back(std::stod(f[3]));
    aggregates.back().stderr_.push_back(std::stod(f[4]));
  }
  return aggregates;
}

}  // namespace dmab
