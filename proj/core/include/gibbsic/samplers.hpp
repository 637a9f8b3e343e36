#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "gibbsic/gibbs.hpp"

namespace gibbsic {

/// Target of a Langevin sampler: the Gibbs density proportional to exp(-beta F_Z(w)),
/// where F_Z(w) = L_E(w, s) - (1/n) log pi(w) is the prior-augmented loss.
///
/// Temperature convention: every sampler step is written in F_Z units. The
/// proposal is N(w - eta grad F_Z(w), (2 eta / beta) I) and the Metropolis energy
/// is beta * F_Z, which makes exp(-beta F_Z) exactly stationary.
struct LossSpec {
  /// F_Z(w) and its gradient, computed together.
  std::function<double(const Eigen::VectorXd& w, Eigen::VectorXd& grad)> value_and_gradient;
  /// Optional L_E(w) (no prior term), recorded at retained samples.
  std::function<double(const Eigen::VectorXd& w)> data_loss;
  double beta = 1.0;
  int n = 1;

  double value(const Eigen::VectorXd& w) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const;
};

/// F_Z for the RF model with Gaussian prior N(0, sigma2/(lambda n) I):
///   F_Z(w) = ||Y - Bw||^2/(2 sigma2 n) + log(2 pi sigma2)/2 + lambda ||w||^2/(2 sigma2)
///            + (p/(2n)) log(2 pi sigma2/(lambda n)).
/// `beta` defaults to n (the Bayesian posterior). B and Y are copied.
LossSpec rf_loss_spec(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior);
LossSpec rf_loss_spec(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                      double beta);

/// Quadratic target F(w) = ||w - center||^2 * curvature / 2 at inverse temperature beta,
/// whose Gibbs law is N(center, I / (beta * curvature)).
LossSpec quadratic_loss_spec(Eigen::VectorXd center, double curvature, double beta);

struct SamplerSettings {
  double eta = 0.01;
  long steps = 1000;
  long burn_in = 500;
  long thinning = 10;
  std::uint64_t seed = 0;
  /// Record a trajectory point every k steps (0 disables).
  long trajectory_every = 0;

  void validate() const;
};

struct TrajectoryPoint {
  long step = 0;
  double loss = 0.0;  ///< L_E when the loss provides data_loss, otherwise F_Z
  double weight_norm = 0.0;
  bool accepted = true;
};

struct SamplerRun {
  std::vector<Eigen::VectorXd> samples;  ///< post burn-in, thinned
  std::vector<double> sample_losses;     ///< data_loss at each retained sample (if available)
  std::vector<TrajectoryPoint> trajectory;
  double acceptance_rate = 1.0;  ///< MALA only; SGLD reports 1
  long steps = 0;
  long burn_in = 0;
  long thinning = 1;
  double eta = 0.0;
  std::uint64_t seed = 0;

  /// floor((steps - burn_in) / thinning)
  static long expected_sample_count(long steps, long burn_in, long thinning);
};

/// w' = w - eta grad F_Z(w) + sqrt(2 eta / beta) noise. Throws NumericalError on a
/// non-finite gradient.
Eigen::VectorXd sgld_step(const Eigen::VectorXd& w, const LossSpec& loss, double eta,
                          const Eigen::VectorXd& noise);

/// Log Metropolis-Hastings ratio for a MALA move from `w` (value fw, gradient gw)
/// to `w_prop` (value fp, gradient gp).
double mala_log_acceptance(const Eigen::VectorXd& w, double fw, const Eigen::VectorXd& gw,
                           const Eigen::VectorXd& w_prop, double fp, const Eigen::VectorXd& gp,
                           double eta, double beta);

SamplerRun sgld_run(const LossSpec& loss, const Eigen::VectorXd& init, const SamplerSettings& settings);
SamplerRun mala_run(const LossSpec& loss, const Eigen::VectorXd& init, const SamplerSettings& settings);

/// Independent draws from a closed-form Gaussian posterior, packaged as a run
/// (`steps` draws, every draw retained after burn-in/thinning bookkeeping).
SamplerRun exact_run(const GibbsPosterior& post, const LossSpec* loss, const SamplerSettings& settings);

/// Plug-in statistic with a batch-means standard error.
struct ScalarEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

enum class ScalarStatistic { EmpiricalLoss, Norm2 };

/// Average of retained samples. Throws ValidationError on an empty run.
Eigen::VectorXd posterior_mean(const SamplerRun& run);
/// Last retained sample (a single Gibbs draw).
const Eigen::VectorXd& final_sample(const SamplerRun& run);
ScalarEstimate posterior_estimate(const SamplerRun& run, ScalarStatistic statistic);
/// Batch-means estimate of the mean of an arbitrary statistic over retained samples.
ScalarEstimate posterior_estimate(const SamplerRun& run,
                                  const std::function<double(const Eigen::VectorXd&)>& statistic);
/// Per-coordinate batch-means standard errors of the sample mean.
Eigen::VectorXd posterior_mean_std_error(const SamplerRun& run, int batches = 20);

/// Mean and batch-means standard error of a scalar series.
ScalarEstimate batch_means(const std::vector<double>& xs, int batches = 20);

/// Mean and standard error from an AR(1) fit of the series: the lag-1
/// autocorrelation rho gives var(mean) = c0 / m * (1 + rho) / (1 - rho).
/// Suits Langevin chains on Gaussian targets, which are AR(1) per eigen-coordinate.
ScalarEstimate ar1_mean(const std::vector<double>& xs);
/// Per-coordinate AR(1) standard errors of the sample mean.
Eigen::VectorXd posterior_mean_std_error_ar1(const SamplerRun& run);

/// `step,loss,weight_norm,accepted`
void write_trajectory_csv(const SamplerRun& run, const std::filesystem::path& path);

}  // namespace gibbsic
