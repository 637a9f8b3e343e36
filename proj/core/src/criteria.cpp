#include "gibbsic/criteria.hpp"

#include <cmath>
#include <type_traits>
#include <numbers>

#include <Eigen/QR>

#include "gibbsic/error.hpp"
#include "gibbsic/rmt.hpp"

namespace gibbsic {

namespace {

template <typename R>
auto* field_ptr(R& r, std::string_view name) {
  using D = std::conditional_t<std::is_const_v<R>, const double, double>;
  D* out = nullptr;
  if (name == "train_mse") out = &r.train_mse;
  else if (name == "test_mse") out = &r.test_mse;
  else if (name == "train_logloss") out = &r.train_logloss;
  else if (name == "aic") out = &r.aic;
  else if (name == "bic") out = &r.bic;
  else if (name == "aic_plus") out = &r.aic_plus;
  else if (name == "bic_plus_exact") out = &r.bic_plus_exact;
  else if (name == "bic_minus_exact") out = &r.bic_minus_exact;
  else if (name == "bic_plus_over") out = &r.bic_plus_over;
  else if (name == "bic_minus_over") out = &r.bic_minus_over;
  else if (name == "wbic") out = &r.wbic;
  else if (name == "l2_term") out = &r.l2_term;
  else if (name == "cov_term") out = &r.cov_term;
  else if (name == "kl_post_prior") out = &r.kl_post_prior;
  else if (name == "kl_prior_post") out = &r.kl_prior_post;
  else if (name == "i_skl") out = &r.i_skl;
  else if (name == "gen_err") out = &r.gen_err;
  else if (name == "wallclock_ms") out = &r.wallclock_ms;
  return out;
}

}  // namespace

bool CriterionReport::all_finite() const {
  for (auto name : kReportColumns) {
    if (name == "p" || name == "seed") continue;
    if (!std::isfinite(report_field(*this, name))) return false;
  }
  return true;
}

double report_field(const CriterionReport& r, std::string_view name) {
  if (name == "p") return r.p;
  if (name == "seed") return static_cast<double>(r.seed);
  if (name == "lambda") return r.lambda;
  if (const double* v = field_ptr(r, name)) return *v;
  throw ValidationError("unknown report column '" + std::string(name) + "'");
}

void set_report_field(CriterionReport& r, std::string_view name, double value) {
  if (name == "p") {
    r.p = static_cast<int>(value);
  } else if (name == "seed") {
    r.seed = static_cast<std::uint64_t>(value);
  } else if (name == "lambda") {
    r.lambda = value;
  } else if (double* v = field_ptr(r, name)) {
    *v = value;
  } else {
    throw ValidationError("unknown report column '" + std::string(name) + "'");
  }
}

double aic_classical(double loglik_hat, int n, int p) {
  detail::require(n >= 1, "aic_classical: n must be positive");
  return -loglik_hat / n + static_cast<double>(p) / n;
}

double bic_classical(double loglik_hat, int n, int p) {
  detail::require(n >= 1, "bic_classical: n must be positive");
  return -loglik_hat / n + static_cast<double>(p) * std::log(static_cast<double>(n)) / (2.0 * n);
}

ClassicalFit classical_fit(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, double sigma2) {
  detail::require(B.rows() == Y.size() && B.rows() > 0, "classical_fit: dimension mismatch");
  detail::require(sigma2 > 0.0, "classical_fit: sigma2 must be positive");
  const double n = static_cast<double>(B.rows());
  ClassicalFit fit;
  fit.k = static_cast<int>(B.cols());
  if (B.cols() > 0) {
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(B);
    fit.rss = (Y - B * cod.solve(Y)).squaredNorm();
  } else {
    fit.rss = Y.squaredNorm();
  }
  fit.loglik = -fit.rss / (2.0 * sigma2) - 0.5 * n * std::log(2.0 * std::numbers::pi * sigma2);
  return fit;
}

double unbiased_residual_variance(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y) {
  detail::require(B.cols() < B.rows(), "unbiased_residual_variance: needs p < n");
  const ClassicalFit fit = classical_fit(B, Y, 1.0);
  return fit.rss / static_cast<double>(B.rows() - B.cols());
}

double aic_plus(double le_gibbs, double i_skl, double beta) {
  detail::require(beta > 0.0, "aic_plus: beta must be positive");
  return le_gibbs + i_skl / beta;
}

double bic_plus_exact(double le_gibbs, double kl_post_prior, int n) {
  detail::require(n >= 1, "bic_plus_exact: n must be positive");
  return le_gibbs + kl_post_prior / n;
}

double bic_minus_exact(double prior_risk, double kl_prior_post, int n) {
  detail::require(n >= 1, "bic_minus_exact: n must be positive");
  return prior_risk - kl_prior_post / n;
}

OverDecomposition bic_plus_over(double le_gibbs, double w_lambda_norm2, double lambda, double sigma2, double r) {
  detail::require(lambda > 0.0 && sigma2 > 0.0 && r > 0.0, "bic_plus_over: parameters must be positive");
  OverDecomposition out;
  out.l2_term = lambda / (2.0 * sigma2) * w_lambda_norm2;
  out.covariance_term = rmt::covariance_term_asymptotic(lambda, r);
  out.value = le_gibbs + out.l2_term + out.covariance_term;
  return out;
}

double bic_minus_over(double prior_risk, const GibbsPosterior& post, double r) {
  const double n = post.n();
  const double ridge = post.ridge();
  const double maha = (ridge * post.mean().squaredNorm() + post.fitted_sq()) / post.sigma2();
  const double trace = static_cast<double>(post.p()) + post.design_frobenius_sq() / ridge;
  return prior_risk - maha / (2.0 * n) - trace / (2.0 * n) + 0.5 * rmt::v_func(1.0 / post.lambda(), r) +
         static_cast<double>(post.p()) / (2.0 * n);
}

namespace {
double wbic_beta(Eigen::Index n) {
  detail::require(n >= 3, "wbic: requires n >= 3 so that log n > 1");
  return static_cast<double>(n) / std::log(static_cast<double>(n));
}
}  // namespace

double wbic_closed_form(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior) {
  const double beta = wbic_beta(B.rows());
  const GibbsPosterior tempered = tempered_posterior(B, Y, prior, beta);
  return tempered.expected_logloss(prior.sigma2);
}

ScalarEstimate wbic_sampled(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                            const SamplerSettings& settings) {
  const double beta = wbic_beta(B.rows());
  // Gibbs density pi(w) exp(-beta L_E) in F_Z units: prior term scaled by n/beta.
  const double t = beta / static_cast<double>(B.rows());
  GaussianPrior scaled = prior;
  scaled.lambda = prior.lambda / t;
  scaled.sigma2 = prior.sigma2 / t;
  LossSpec loss = rf_loss_spec(B, Y, scaled, static_cast<double>(B.rows()));
  // Report L_E at the model's own sigma2.
  const double s2 = prior.sigma2;
  const double n = static_cast<double>(B.rows());
  loss.data_loss = [B, Y, s2, n](const Eigen::VectorXd& w) {
    return (Y - B * w).squaredNorm() / (2.0 * s2 * n) + 0.5 * std::log(2.0 * std::numbers::pi * s2);
  };
  const SamplerRun run = mala_run(loss, Eigen::VectorXd::Zero(B.cols()), settings);
  return posterior_estimate(run, ScalarStatistic::EmpiricalLoss);
}

double gen_gap_closed_form(const Replicate& rep, const GibbsPosterior& post) {
  return post.expected_logloss_on(rep.B_hold, rep.Y_hold) - post.expected_logloss();
}

ISklEstimate i_skl_estimate(const ReplicateGenerator& gen, const GaussianPrior& prior, const ISklOptions& opts) {
  detail::require(opts.replicates >= 2, "i_skl_estimate: needs at least 2 replicates");
  detail::require(static_cast<bool>(gen), "i_skl_estimate: no replicate generator");
  ISklEstimate est;
  est.replicates = opts.replicates;
  double beta = 0.0;
  for (int k = 0; k < opts.replicates; ++k) {
    const Replicate rep = gen(k);
    beta = static_cast<double>(rep.B.rows());
    double gap = 0.0;
    if (opts.method == ISklMethod::ClosedForm) {
      gap = gen_gap_closed_form(rep, posterior(rep.B, rep.Y, prior));
    } else {
      const LossSpec loss = rf_loss_spec(rep.B, rep.Y, prior);
      SamplerSettings s = opts.sampler;
      s.seed = derive_seed(opts.sampler.seed, {static_cast<std::uint64_t>(k)});
      const SamplerRun run = mala_run(loss, Eigen::VectorXd::Zero(rep.B.cols()), s);
      const double s2 = prior.sigma2;
      const double m = static_cast<double>(rep.B_hold.rows());
      const double n = static_cast<double>(rep.B.rows());
      const ScalarEstimate g = posterior_estimate(run, [&](const Eigen::VectorXd& w) {
        return (rep.Y_hold - rep.B_hold * w).squaredNorm() / (2.0 * s2 * m) -
               (rep.Y - rep.B * w).squaredNorm() / (2.0 * s2 * n);
      });
      gap = g.value;
    }
    est.per_replicate_gen.push_back(gap);
  }
  const double M = static_cast<double>(opts.replicates);
  double mean = 0.0;
  for (double g : est.per_replicate_gen) mean += g;
  mean /= M;
  double ss = 0.0;
  for (double g : est.per_replicate_gen) ss += (g - mean) * (g - mean);
  est.gen_error = mean;
  est.i_skl = beta * mean;
  est.std_error = beta * std::sqrt(ss / (M - 1.0) / M);
  return est;
}

ReplicateGenerator rf_replicates(const TeacherModel& teacher, const RFModel& model, int n, int m_hold,
                                 std::uint64_t base_seed) {
  detail::require(n > 0 && m_hold > 0, "rf_replicates: sizes must be positive");
  return [teacher, model, n, m_hold, base_seed](int k) {
    const std::uint64_t seed = derive_seed(base_seed, {static_cast<std::uint64_t>(k)});
    const Dataset train = sample_dataset(teacher, n, seed);
    const Dataset hold = sample_holdout(teacher, m_hold, seed);
    Replicate rep;
    rep.B = design_matrix(model, train.X).B;
    rep.Y = train.Y;
    rep.B_hold = design_matrix(model, hold.X).B;
    rep.Y_hold = hold.Y;
    return rep;
  };
}

Selection select_model(const std::vector<int>& ps, const std::vector<double>& values) {
  detail::require(!ps.empty(), "select_model: empty list");
  detail::require(ps.size() == values.size(), "select_model: size mismatch");
  Selection best;
  bool have = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    detail::require(std::isfinite(values[i]), "select_model: non-finite criterion value at p = " +
                                                  std::to_string(ps[i]));
    if (!have || values[i] < best.value || (values[i] == best.value && ps[i] < best.p)) {
      best = {i, ps[i], values[i]};
      have = true;
    }
  }
  return best;
}

Selection select_model(const std::vector<CriterionReport>& reports, std::string_view criterion) {
  detail::require(!reports.empty(), "select_model: empty list");
  std::vector<int> ps;
  std::vector<double> values;
  for (const auto& r : reports) {
    ps.push_back(r.p);
    values.push_back(report_field(r, criterion));
  }
  return select_model(ps, values);
}

}  // namespace gibbsic
