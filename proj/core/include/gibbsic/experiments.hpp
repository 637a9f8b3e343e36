#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsic/criteria.hpp"
#include "gibbsic/samplers.hpp"
#include "gibbsic/sweep.hpp"

namespace gibbsic {

// Marginal-likelihood identity ------------------------------------------------

struct IdentityCheck {
  int instances = 0;
  double max_plus_minus = 0.0;     ///< max |BIC+ - BIC-|
  double max_plus_marginal = 0.0;  ///< max |BIC+ + log m / n|
  double max_minus_marginal = 0.0;
};

/// Random Gaussian designs with p <= 50 and n <= 100, random lambda and sigma2.
/// BIC+ uses the exact posterior expectation of L_E.
IdentityCheck marginal_identity_check(int instances, std::uint64_t seed);

// Marchenko-Pastur transforms ------------------------------------------------

struct TransformRow {
  double gamma = 0.0, r = 0.0;
  double F = 0.0, eta = 0.0, shannon = 0.0, V = 0.0;
  double eta_quadrature = 0.0, shannon_quadrature = 0.0;
};

struct TransformCheck {
  std::vector<TransformRow> rows;
  double max_eta_error = 0.0;
  double max_shannon_error = 0.0;
  double max_identity_error = 0.0;  ///< max |V - r * shannon|
};

/// gamma and r log-spaced on [1e-2, 1e2] x [1e-1, 1e1], `grid` points each.
TransformCheck rmt_transform_check(int grid = 20);
void write_transform_csv(const std::vector<TransformRow>& rows, const std::filesystem::path& path);

// Finite vs asymptotic covariance term ----------------------------------------

struct CovarianceRow {
  std::string activation;
  double lambda = 0.0;
  double r = 0.0;
  int p = 0;
  double finite_mean = 0.0;
  double finite_sd = 0.0;
  double asymptotic = 0.0;
  double rel_error = 0.0;
};

/// Finite covariance term averaged over feature seeds (fresh X and F per seed).
std::vector<CovarianceRow> covariance_check(const std::vector<std::string>& activations,
                                            const std::vector<double>& lambdas, const std::vector<double>& ratios,
                                            int n, int d, int seeds, std::uint64_t base_seed);
void write_covariance_csv(const std::vector<CovarianceRow>& rows, const std::filesystem::path& path);

// Sampler fidelity -------------------------------------------------------------

struct SamplerBenchConfig {
  int n = 200;
  int p = 600;
  int d = 400;
  double noise_var = 0.1;
  double sigma2 = 0.0025;
  double lambda = 0.01;
  std::string activation = "relu_std";
  double eta_mala = 1e-4;
  double eta_sgld = 5e-5;
  long steps = 1000000;
  long burn_in = 20000;
  long thinning = 20;
  long trajectory_every = 100;
  int batches = 50;
  bool use_batch_means = false;  ///< AR(1) standard errors otherwise
  std::uint64_t seed = 0;
};

struct SamplerFidelity {
  int dof = 0;
  double threshold = 0.0;  ///< chi-square 0.99 quantile
  double chi2_mala = 0.0;
  double chi2_sgld = 0.0;
  double mala_acceptance = 0.0;
  double mse_exact = 0.0;  ///< closed-form E[training MSE] under the posterior
  double mse_mala = 0.0;
  double mse_sgld = 0.0;
  double mse_rel_diff = 0.0;  ///< |mala - sgld| / mala
  double norm2_mala = 0.0;
  double norm2_sgld = 0.0;
  SamplerRun mala;
  SamplerRun sgld;
};

/// Runs MALA and SGLD on the RF target from w = 0. Sample means are compared with
/// the closed-form posterior mean in the eigenbasis of the posterior precision,
/// where the target's coordinates are independent N(0, 1). Each coordinate gets a
/// z statistic from AR(1) standard errors (or a batch-means t statistic mapped to
/// a normal score through the t(batches - 1) CDF); the sum of squared scores is
/// compared with chi-square(p).
SamplerFidelity sampler_fidelity(const SamplerBenchConfig& cfg);

/// Training MSE along a run's trajectory (recovered from the recorded L_E).
std::vector<double> trajectory_mse(const SamplerRun& run, double sigma2);

// Symmetrized KL information ---------------------------------------------------

struct ISklConsistency {
  ISklEstimate closed_form;
  ISklEstimate mala;
  double combined_se = 0.0;
  double z = 0.0;  ///< |difference| / combined SE
};

/// Closed-form and MALA-based estimates on the same replicate datasets.
ISklConsistency iskl_consistency(int n, int p, int d, int replicates, const SamplerSettings& mala,
                                 std::uint64_t seed);

struct ISklTrendRow {
  int n = 0;
  int p = 0;
  double gen = 0.0;  ///< i_skl / beta
  double std_error = 0.0;
  double p_over_n = 0.0;
  double abs_deviation = 0.0;
};

/// Well-specified linear-Gaussian family (features = inputs, sigma2 = noise
/// variance): the Gibbs posterior's generalization gap with the label noise
/// integrated in closed form given each design, averaged over `replicates` designs.
std::vector<ISklTrendRow> iskl_classical_trend(int p, const std::vector<int>& ns, int replicates, double lambda,
                                               std::uint64_t seed);

// Presets and reproduction -----------------------------------------------------

struct Preset {
  std::string id;
  std::string description;
  bool is_sweep = true;
  SweepConfig config;                     ///< for sweep presets
  std::vector<std::string> figures;       ///< SVGs emitted for sweep presets
};

const std::vector<Preset>& presets();
const Preset& find_preset(std::string_view id);

struct ReproduceOptions {
  std::filesystem::path out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;
  int seeds = 0;  ///< 0 keeps the preset's seed count
  long steps = 0;  ///< sampler steps for fig7/fig8/iskl-consistency; 0 keeps the preset's
  std::vector<std::string> overrides;
};

/// Runs a preset and writes its CSVs and SVGs. Returns the files written.
std::vector<std::filesystem::path> reproduce(std::string_view id, const ReproduceOptions& opts);

/// Builds a preset's config with seed, seed-count and key=value overrides applied.
SweepConfig preset_config(const Preset& preset, const ReproduceOptions& opts);

}  // namespace gibbsic
