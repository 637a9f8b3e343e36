#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsic/criteria.hpp"
#include "gibbsic/sweep_config.hpp"

namespace gibbsic {

struct RowFailure {
  int p = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::string message;
};

struct SweepResult {
  SweepConfig config;
  std::uint64_t config_hash = 0;
  /// Successful rows ordered by (lambda index, p, seed index) regardless of scheduling.
  std::vector<CriterionReport> rows;
  std::vector<RowFailure> failures;

  std::vector<CriterionReport> rows_for_lambda(double lambda) const;
};

/// Seed-averaged curve for one lambda: mean and sample standard deviation of every
/// report column at each p. Failed rows are absent, so `count` may vary with p.
struct Curve {
  double lambda = 0.0;
  std::vector<int> ps;
  std::vector<int> count;
  std::vector<std::array<double, kReportColumns.size()>> mean;
  std::vector<std::array<double, kReportColumns.size()>> sd;

  std::vector<double> mean_of(std::string_view column) const;
  std::vector<double> sd_of(std::string_view column) const;
  std::size_t index_of_p(int p) const;
};

std::size_t column_index(std::string_view column);

Curve aggregate(const std::vector<CriterionReport>& rows, double lambda = 0.0);
std::vector<Curve> aggregate(const SweepResult& result);

/// Seeds used by one (p, seed) row. Data and features depend on the seed only, so
/// feature matrices are nested across the p grid and curves are paired across p.
struct RowSeeds {
  std::uint64_t teacher;
  std::uint64_t data;
  std::uint64_t features;
  std::uint64_t sampler;
  std::uint64_t replicates;
};
RowSeeds row_seeds(const SweepConfig& config, int p, std::uint64_t seed, double lambda);

/// Noise variance actually used for a row (resolves Sigma2Mode::LargestModel).
double resolve_sigma2(const SweepConfig& config, std::uint64_t seed);

/// Full pipeline for one (p, seed, lambda): data, features, posterior, sampler,
/// every criterion and decomposition. Throws on failure.
CriterionReport compute_row(const SweepConfig& config, int p, std::uint64_t seed, double lambda);

/// Runs every (lambda, p, seed) row on `jobs` worker threads. Rows that throw are
/// recorded in `failures` and the sweep continues. Output is independent of `jobs`.
SweepResult run_sweep(const SweepConfig& config, int jobs = 1);

/// Writes `<name>.csv` (or `<name>_lambda_<value>.csv` per lambda when there are
/// several), `<name>_failures.csv` when rows failed, and `<name>_config.json`.
/// Returns the CSV paths in lambda order.
std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace gibbsic
