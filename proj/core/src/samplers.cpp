#include "gibbsic/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "gibbsic/error.hpp"

namespace gibbsic {

namespace {

void check_finite_gradient(const Eigen::VectorXd& g, long step, const Eigen::VectorXd& w) {
  if (g.allFinite()) return;
  std::ostringstream msg;
  msg << "sampler: non-finite gradient at step " << step << " (|w| = " << w.norm()
      << ", finite entries " << g.array().isFinite().count() << " of " << g.size() << ")";
  throw NumericalError(msg.str());
}

double report_loss(const LossSpec& loss, const Eigen::VectorXd& w, double f) {
  return loss.data_loss ? loss.data_loss(w) : f;
}

void keep_if_due(SamplerRun& run, const LossSpec* loss, const Eigen::VectorXd& w, long step) {
  if (step <= run.burn_in || (step - run.burn_in) % run.thinning != 0) return;
  run.samples.push_back(w);
  if (loss && loss->data_loss) run.sample_losses.push_back(loss->data_loss(w));
}

void maybe_trace(SamplerRun& run, long every, long step, double loss_value, const Eigen::VectorXd& w,
                 bool accepted) {
  if (every <= 0 || step % every != 0) return;
  run.trajectory.push_back({step, loss_value, w.norm(), accepted});
}

SamplerRun start_run(const LossSpec& loss, const Eigen::VectorXd& init, const SamplerSettings& s) {
  s.validate();
  detail::require(static_cast<bool>(loss.value_and_gradient), "sampler: loss has no gradient");
  detail::require(loss.beta > 0.0 && std::isfinite(loss.beta), "sampler: beta must be positive");
  detail::require(init.allFinite(), "sampler: initial point is not finite");
  SamplerRun run;
  run.steps = s.steps;
  run.burn_in = s.burn_in;
  run.thinning = s.thinning;
  run.eta = s.eta;
  run.seed = s.seed;
  run.samples.reserve(static_cast<std::size_t>(SamplerRun::expected_sample_count(s.steps, s.burn_in, s.thinning)));
  return run;
}

}  // namespace

double LossSpec::value(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g;
  return value_and_gradient(w, g);
}

Eigen::VectorXd LossSpec::gradient(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g;
  value_and_gradient(w, g);
  return g;
}

LossSpec rf_loss_spec(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior) {
  return rf_loss_spec(B, Y, prior, static_cast<double>(B.rows()));
}

LossSpec rf_loss_spec(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                      double beta) {
  prior.validate();
  detail::require(B.rows() == Y.size() && B.rows() > 0, "rf_loss_spec: B and Y disagree on n");
  detail::require(beta > 0.0, "rf_loss_spec: beta must be positive");
  const double n = static_cast<double>(B.rows());
  const double p = static_cast<double>(B.cols());
  const double s2 = prior.sigma2;
  const double lam = prior.lambda;
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * s2);
  const double prior_const = p / (2.0 * n) * std::log(2.0 * std::numbers::pi * s2 / (lam * n));

  auto data = std::make_shared<const std::pair<Eigen::MatrixXd, Eigen::VectorXd>>(B, Y);
  LossSpec spec;
  spec.beta = beta;
  spec.n = static_cast<int>(B.rows());
  spec.value_and_gradient = [=](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    const Eigen::VectorXd r = data->second - data->first * w;
    grad.noalias() = -(data->first.transpose() * r) / (n * s2);
    grad.noalias() += (lam / s2) * w;
    return r.squaredNorm() / (2.0 * s2 * n) + log_norm + lam * w.squaredNorm() / (2.0 * s2) + prior_const;
  };
  spec.data_loss = [=](const Eigen::VectorXd& w) {
    return (data->second - data->first * w).squaredNorm() / (2.0 * s2 * n) + log_norm;
  };
  return spec;
}

LossSpec quadratic_loss_spec(Eigen::VectorXd center, double curvature, double beta) {
  detail::require(curvature > 0.0, "quadratic_loss_spec: curvature must be positive");
  detail::require(beta > 0.0, "quadratic_loss_spec: beta must be positive");
  LossSpec spec;
  spec.beta = beta;
  spec.n = 1;
  spec.value_and_gradient = [c = std::move(center), curvature](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    grad = curvature * (w - c);
    return 0.5 * curvature * (w - c).squaredNorm();
  };
  return spec;
}

void SamplerSettings::validate() const {
  detail::require(eta > 0.0 && std::isfinite(eta), "sampler: step size eta must be positive");
  detail::require(steps >= 1, "sampler: steps must be at least 1");
  detail::require(burn_in >= 0 && burn_in < steps, "sampler: burn_in must lie in [0, steps)");
  detail::require(thinning >= 1, "sampler: thinning must be at least 1");
  detail::require(trajectory_every >= 0, "sampler: trajectory_every must be non-negative");
}

long SamplerRun::expected_sample_count(long steps, long burn_in, long thinning) {
  if (steps <= burn_in || thinning < 1) return 0;
  return (steps - burn_in) / thinning;
}

Eigen::VectorXd sgld_step(const Eigen::VectorXd& w, const LossSpec& loss, double eta,
                          const Eigen::VectorXd& noise) {
  detail::require(eta >= 0.0, "sgld_step: eta must be non-negative");
  detail::require(noise.size() == w.size(), "sgld_step: noise dimension mismatch");
  Eigen::VectorXd g;
  loss.value_and_gradient(w, g);
  check_finite_gradient(g, 0, w);
  return w - eta * g + std::sqrt(2.0 * eta / loss.beta) * noise;
}

double mala_log_acceptance(const Eigen::VectorXd& w, double fw, const Eigen::VectorXd& gw,
                           const Eigen::VectorXd& w_prop, double fp, const Eigen::VectorXd& gp,
                           double eta, double beta) {
  // q(a | b) is N(b - eta g(b), (2 eta / beta) I); log q(a|b) = -beta ||a - b + eta g(b)||^2 / (4 eta).
  const double fwd = (w_prop - w + eta * gw).squaredNorm();
  const double rev = (w - w_prop + eta * gp).squaredNorm();
  return -beta * (fp - fw) - beta * (rev - fwd) / (4.0 * eta);
}

SamplerRun sgld_run(const LossSpec& loss, const Eigen::VectorXd& init, const SamplerSettings& settings) {
  SamplerRun run = start_run(loss, init, settings);
  Rng rng(settings.seed);
  const double noise_scale = std::sqrt(2.0 * settings.eta / loss.beta);
  Eigen::VectorXd w = init;
  Eigen::VectorXd g;
  for (long t = 1; t <= settings.steps; ++t) {
    loss.value_and_gradient(w, g);
    check_finite_gradient(g, t, w);
    w.noalias() -= settings.eta * g;
    w += noise_scale * rng.normal_vector(w.size());
    keep_if_due(run, &loss, w, t);
    if (settings.trajectory_every > 0 && t % settings.trajectory_every == 0)
      maybe_trace(run, settings.trajectory_every, t, loss.data_loss ? loss.data_loss(w) : loss.value(w), w, true);
  }
  run.acceptance_rate = 1.0;
  return run;
}

SamplerRun mala_run(const LossSpec& loss, const Eigen::VectorXd& init, const SamplerSettings& settings) {
  SamplerRun run = start_run(loss, init, settings);
  Rng rng(settings.seed);
  const double eta = settings.eta;
  const double beta = loss.beta;
  const double noise_scale = std::sqrt(2.0 * eta / beta);

  Eigen::VectorXd w = init;
  Eigen::VectorXd g, g_prop;
  double f = loss.value_and_gradient(w, g);
  check_finite_gradient(g, 0, w);
  long accepted = 0;
  for (long t = 1; t <= settings.steps; ++t) {
    Eigen::VectorXd w_prop = w - eta * g + noise_scale * rng.normal_vector(w.size());
    const double log_u = std::log1p(-rng.uniform());
    const double f_prop = loss.value_and_gradient(w_prop, g_prop);
    bool ok = std::isfinite(f_prop) && g_prop.allFinite();
    if (ok) ok = log_u <= mala_log_acceptance(w, f, g, w_prop, f_prop, g_prop, eta, beta);
    if (ok) {
      w.swap(w_prop);
      g.swap(g_prop);
      f = f_prop;
      ++accepted;
    }
    keep_if_due(run, &loss, w, t);
    if (settings.trajectory_every > 0 && t % settings.trajectory_every == 0)
      maybe_trace(run, settings.trajectory_every, t, report_loss(loss, w, f), w, ok);
  }
  run.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(settings.steps);
  return run;
}

SamplerRun exact_run(const GibbsPosterior& post, const LossSpec* loss, const SamplerSettings& settings) {
  settings.validate();
  SamplerRun run;
  run.steps = settings.steps;
  run.burn_in = settings.burn_in;
  run.thinning = settings.thinning;
  run.eta = settings.eta;
  run.seed = settings.seed;
  Rng rng(settings.seed);
  for (long t = 1; t <= settings.steps; ++t) {
    // Draws are independent, so burn-in draws are simply skipped without sampling.
    if (t <= run.burn_in || (t - run.burn_in) % run.thinning != 0) continue;
    const Eigen::VectorXd w = post.sample(rng);
    run.samples.push_back(w);
    if (loss && loss->data_loss) run.sample_losses.push_back(loss->data_loss(w));
    if (settings.trajectory_every > 0 && t % settings.trajectory_every == 0)
      run.trajectory.push_back({t, loss && loss->data_loss ? run.sample_losses.back() : 0.0, w.norm(), true});
  }
  run.acceptance_rate = 1.0;
  return run;
}

Eigen::VectorXd posterior_mean(const SamplerRun& run) {
  detail::require(!run.samples.empty(), "posterior_mean: run has no retained samples");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(run.samples.front().size());
  for (const auto& s : run.samples) acc += s;
  return acc / static_cast<double>(run.samples.size());
}

const Eigen::VectorXd& final_sample(const SamplerRun& run) {
  detail::require(!run.samples.empty(), "final_sample: run has no retained samples");
  return run.samples.back();
}

ScalarEstimate batch_means(const std::vector<double>& xs, int batches) {
  detail::require(!xs.empty(), "batch_means: empty series");
  ScalarEstimate est;
  est.samples = static_cast<long>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  est.value = sum / static_cast<double>(xs.size());
  const long per = est.samples / std::max(batches, 1);
  if (batches < 2 || per < 1) {
    // Too short for batching: fall back to the i.i.d. standard error.
    double ss = 0.0;
    for (double x : xs) ss += (x - est.value) * (x - est.value);
    est.std_error = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size())) : 0.0;
    return est;
  }
  std::vector<double> means(static_cast<std::size_t>(batches), 0.0);
  for (int b = 0; b < batches; ++b) {
    for (long i = 0; i < per; ++i) means[b] += xs[static_cast<std::size_t>(b * per + i)];
    means[b] /= static_cast<double>(per);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= batches;
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  est.std_error = std::sqrt(ss / (batches - 1) / batches);
  return est;
}

ScalarEstimate posterior_estimate(const SamplerRun& run,
                                  const std::function<double(const Eigen::VectorXd&)>& statistic) {
  detail::require(!run.samples.empty(), "posterior_estimate: run has no retained samples");
  std::vector<double> xs;
  xs.reserve(run.samples.size());
  for (const auto& s : run.samples) xs.push_back(statistic(s));
  return batch_means(xs);
}

ScalarEstimate posterior_estimate(const SamplerRun& run, ScalarStatistic statistic) {
  detail::require(!run.samples.empty(), "posterior_estimate: run has no retained samples");
  switch (statistic) {
    case ScalarStatistic::EmpiricalLoss:
      detail::require(run.sample_losses.size() == run.samples.size(),
                      "posterior_estimate: run was recorded without a data loss");
      return batch_means(run.sample_losses);
    case ScalarStatistic::Norm2:
      return posterior_estimate(run, [](const Eigen::VectorXd& w) { return w.squaredNorm(); });
  }
  throw ValidationError("posterior_estimate: unknown statistic");
}

Eigen::VectorXd posterior_mean_std_error(const SamplerRun& run, int batches) {
  detail::require(!run.samples.empty(), "posterior_mean_std_error: run has no retained samples");
  const Eigen::Index p = run.samples.front().size();
  const long m = static_cast<long>(run.samples.size());
  const long per = m / std::max(batches, 1);
  detail::require(batches >= 2 && per >= 1, "posterior_mean_std_error: too few samples for batching");
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(p, batches);
  for (int b = 0; b < batches; ++b) {
    for (long i = 0; i < per; ++i) means.col(b) += run.samples[static_cast<std::size_t>(b * per + i)];
    means.col(b) /= static_cast<double>(per);
  }
  const Eigen::VectorXd grand = means.rowwise().mean();
  const Eigen::VectorXd ss = (means.colwise() - grand).rowwise().squaredNorm();
  return (ss / static_cast<double>((batches - 1) * batches)).cwiseSqrt();
}

namespace {

double ar1_factor(double rho) {
  rho = std::clamp(rho, -0.999, 0.999999);
  return (1.0 + rho) / (1.0 - rho);
}

}  // namespace

ScalarEstimate ar1_mean(const std::vector<double>& xs) {
  detail::require(xs.size() >= 3, "ar1_mean: needs at least 3 values");
  const double m = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= m;
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    c0 += (xs[i] - mean) * (xs[i] - mean);
    if (i + 1 < xs.size()) c1 += (xs[i] - mean) * (xs[i + 1] - mean);
  }
  const double rho = c0 > 0.0 ? c1 / c0 : 0.0;
  return {mean, std::sqrt(c0 / m / m * ar1_factor(rho)), static_cast<long>(xs.size())};
}

Eigen::VectorXd posterior_mean_std_error_ar1(const SamplerRun& run) {
  detail::require(run.samples.size() >= 3, "posterior_mean_std_error_ar1: needs at least 3 samples");
  const Eigen::VectorXd mean = posterior_mean(run);
  const Eigen::Index p = mean.size();
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(p), c1 = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    const Eigen::VectorXd dev = run.samples[i] - mean;
    c0.array() += dev.array().square();
    if (i + 1 < run.samples.size()) c1.array() += dev.array() * (run.samples[i + 1] - mean).array();
  }
  const double m = static_cast<double>(run.samples.size());
  Eigen::VectorXd se(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double rho = c0[j] > 0.0 ? c1[j] / c0[j] : 0.0;
    se[j] = std::sqrt(c0[j] / m / m * ar1_factor(rho));
  }
  return se;
}

void write_trajectory_csv(const SamplerRun& run, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "step,loss,weight_norm,accepted\n";
  char buf[96];
  for (const auto& pt : run.trajectory) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%d\n", pt.step, pt.loss, pt.weight_norm, pt.accepted ? 1 : 0);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace gibbsic
