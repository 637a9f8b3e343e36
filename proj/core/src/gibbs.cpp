#include "gibbsic/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gibbsic/error.hpp"
#include "gibbsic/log.hpp"

namespace gibbsic {

namespace {

constexpr double kConditionWarn = 1e12;

double half_log_2pi_s(double s) { return 0.5 * std::log(2.0 * std::numbers::pi * s); }

void check_inputs(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                  const char* who) {
  prior.validate();
  if (B.rows() != Y.size() || B.rows() == 0)
    throw ValidationError(std::string(who) + ": B has " + std::to_string(B.rows()) +
                          " rows but Y has " + std::to_string(Y.size()) + " entries");
  if (prior.p != 0 && prior.p != B.cols())
    throw ValidationError(std::string(who) + ": prior dimension " + std::to_string(prior.p) +
                          " does not match B with " + std::to_string(B.cols()) + " columns");
}

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& lower, const char* who) {
  Eigen::LLT<Eigen::MatrixXd> llt(lower);
  const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
  const double min_pivot = diag.size() ? diag.minCoeff() : 1.0;
  if (llt.info() != Eigen::Success || !(min_pivot > 0.0) || !std::isfinite(min_pivot)) {
    std::ostringstream msg;
    msg << who << ": Cholesky factorization failed (matrix numerically indefinite), minimum pivot "
        << min_pivot;
    throw NumericalError(msg.str());
  }
  return llt;
}

}  // namespace

void GaussianPrior::validate() const {
  detail::require(lambda > 0.0 && std::isfinite(lambda), "GaussianPrior: lambda must be positive");
  detail::require(sigma2 > 0.0 && std::isfinite(sigma2), "GaussianPrior: sigma2 must be positive");
  detail::require(p >= 0, "GaussianPrior: p must be non-negative");
}

Eigen::VectorXd gram_spectrum(const Eigen::MatrixXd& B) {
  const Eigen::Index n = B.rows(), p = B.cols();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  if (p == 0 || n == 0) return out;
  const bool primal = p <= n;
  const Eigen::Index k = primal ? p : n;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, k);
  if (primal)
    G.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
  else
    G.selfadjointView<Eigen::Lower>().rankUpdate(B);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("gram_spectrum: eigen-solve failed");
  // Ascending: pad zeros first.
  out.tail(k) = es.eigenvalues().cwiseMax(0.0);
  return out;
}

GibbsPosterior posterior(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior) {
  check_inputs(B, Y, prior, "posterior");
  const int n = static_cast<int>(B.rows());
  const Eigen::Index p = B.cols();
  const double ridge = prior.lambda * n;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  A.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
  A.diagonal().array() += ridge;

  GibbsPosterior post;
  post.llt_ = checked_llt(A, "posterior");
  post.mean_ = post.llt_.solve(B.transpose() * Y);
  post.spectrum_ = gram_spectrum(B);
  post.lambda_ = prior.lambda;
  post.sigma2_ = prior.sigma2;
  post.n_ = n;
  const Eigen::VectorXd fitted = B * post.mean_;
  post.fitted_sq_ = fitted.squaredNorm();
  post.resid_sq_ = (Y - fitted).squaredNorm();
  post.frob_sq_ = B.squaredNorm();

  const double cond = post.condition_number();
  if (cond > kConditionWarn) {
    std::ostringstream msg;
    msg << "posterior: precision condition number " << cond << " exceeds " << kConditionWarn;
    log_warning(msg.str());
  }
  return post;
}

GibbsPosterior posterior(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                         int n) {
  detail::require(B.rows() == n, "posterior: B row count differs from n");
  return posterior(B, Y, prior);
}

GibbsPosterior tempered_posterior(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y,
                                  const GaussianPrior& prior, double beta) {
  detail::require(beta > 0.0, "tempered_posterior: beta must be positive");
  const double t = beta / static_cast<double>(B.rows());
  GaussianPrior scaled = prior;
  scaled.lambda = prior.lambda / t;
  scaled.sigma2 = prior.sigma2 / t;
  return posterior(B, Y, scaled);
}

Eigen::MatrixXd GibbsPosterior::covariance() const {
  const Eigen::Index p = mean_.size();
  Eigen::MatrixXd S = llt_.solve(Eigen::MatrixXd::Identity(p, p));
  S = 0.5 * (S + S.transpose());
  return sigma2_ * S;
}

Eigen::MatrixXd GibbsPosterior::precision() const {
  return llt_.reconstructedMatrix() / sigma2_;
}

double GibbsPosterior::log_det_covariance() const {
  return static_cast<double>(p()) * std::log(sigma2_) - log_det_from_llt(llt_);
}

double GibbsPosterior::log_det_normalized_precision() const {
  return log_det_from_llt(llt_) - static_cast<double>(p()) * std::log(ridge());
}

double GibbsPosterior::trace_covariance() const {
  return sigma2_ * (1.0 / (spectrum_.array() + ridge())).sum();
}

double GibbsPosterior::trace_fitted_covariance() const {
  return sigma2_ * (spectrum_.array() / (spectrum_.array() + ridge())).sum();
}

double GibbsPosterior::condition_number() const {
  if (spectrum_.size() == 0) return 1.0;
  return (spectrum_.maxCoeff() + ridge()) / (spectrum_.minCoeff() + ridge());
}

Eigen::VectorXd GibbsPosterior::sample(Rng& rng) const {
  const Eigen::VectorXd z = rng.normal_vector(mean_.size());
  return mean_ + std::sqrt(sigma2_) * llt_.matrixU().solve(z);
}

double GibbsPosterior::expected_logloss(double sigma2_eval) const {
  detail::require(sigma2_eval > 0.0, "expected_logloss: sigma2 must be positive");
  const double n = static_cast<double>(n_);
  return (resid_sq_ + trace_fitted_covariance()) / (2.0 * sigma2_eval * n) + half_log_2pi_s(sigma2_eval);
}

double GibbsPosterior::expected_logloss_on(const Eigen::MatrixXd& B_new, const Eigen::VectorXd& Y_new,
                                           double sigma2_eval) const {
  detail::require(sigma2_eval > 0.0, "expected_logloss_on: sigma2 must be positive");
  detail::require(B_new.cols() == p() && B_new.rows() == Y_new.size() && B_new.rows() > 0,
                  "expected_logloss_on: dimension mismatch");
  const double m = static_cast<double>(B_new.rows());
  const double resid = (Y_new - B_new * mean_).squaredNorm();
  // tr(B S B^T) = sigma2 ||L^{-1} B^T||_F^2
  const double spread = sigma2_ * llt_.matrixL().solve(B_new.transpose()).squaredNorm();
  return (resid + spread) / (2.0 * sigma2_eval * m) + half_log_2pi_s(sigma2_eval);
}

double gaussian_kl(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1,
                   const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2) {
  const Eigen::Index p = mean1.size();
  detail::require(mean2.size() == p && cov1.rows() == p && cov1.cols() == p && cov2.rows() == p &&
                      cov2.cols() == p,
                  "gaussian_kl: dimension mismatch");
  const auto llt1 = checked_llt(cov1, "gaussian_kl (first covariance)");
  const auto llt2 = checked_llt(cov2, "gaussian_kl (second covariance)");
  const Eigen::VectorXd diff = mean2 - mean1;
  const double maha = llt2.matrixL().solve(diff).squaredNorm();
  // tr(S2^{-1} S1) = ||L2^{-1} L1||_F^2
  const Eigen::MatrixXd L1 = llt1.matrixL();
  const double trace = llt2.matrixL().solve(L1).squaredNorm();
  const double logdet = log_det_from_llt(llt2) - log_det_from_llt(llt1);
  return 0.5 * (maha + trace - static_cast<double>(p) + logdet);
}

double kl_posterior_prior(const GibbsPosterior& post, const GaussianPrior& prior) {
  prior.validate();
  detail::require(prior.p == 0 || prior.p == post.p(), "kl_posterior_prior: dimension mismatch");
  detail::require(prior.lambda == post.lambda() && prior.sigma2 == post.sigma2(),
                  "kl_posterior_prior: prior parameters differ from those of the posterior");
  const double ridge = post.ridge();
  const double mean_term = ridge * post.mean().squaredNorm() / post.sigma2();
  const double trace_term = (ridge / (post.gram_spectrum().array() + ridge)).sum();
  return 0.5 * (mean_term + post.log_det_normalized_precision() + trace_term -
                static_cast<double>(post.p()));
}

double kl_prior_posterior(const GibbsPosterior& post, const GaussianPrior& prior) {
  prior.validate();
  detail::require(prior.p == 0 || prior.p == post.p(), "kl_prior_posterior: dimension mismatch");
  detail::require(prior.lambda == post.lambda() && prior.sigma2 == post.sigma2(),
                  "kl_prior_posterior: prior parameters differ from those of the posterior");
  const double ridge = post.ridge();
  // W^T S^{-1} W = (lambda n ||W||^2 + ||B W||^2) / sigma2
  const double maha = (ridge * post.mean().squaredNorm() + post.fitted_sq()) / post.sigma2();
  // tr((sigma2/(lambda n)) S^{-1}) - p = ||B||_F^2 / (lambda n)
  const double trace_minus_p = post.design_frobenius_sq() / ridge;
  return 0.5 * (maha - post.log_det_normalized_precision() + trace_minus_p);
}

double prior_expected_risk(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior) {
  check_inputs(B, Y, prior, "prior_expected_risk");
  const double n = static_cast<double>(B.rows());
  const double prior_var = prior.sigma2 / (prior.lambda * n);
  return (Y.squaredNorm() + prior_var * B.squaredNorm()) / (2.0 * prior.sigma2 * n) +
         half_log_2pi_s(prior.sigma2);
}

double prior_expected_risk(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                           int n) {
  detail::require(B.rows() == n, "prior_expected_risk: B row count differs from n");
  return prior_expected_risk(B, Y, prior);
}

double log_marginal_exact(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior) {
  check_inputs(B, Y, prior, "log_marginal_exact");
  const Eigen::Index n = B.rows();
  detail::require(n <= 2000, "log_marginal_exact: dense n x n evaluation limited to n <= 2000");
  const double prior_var = prior.sigma2 / (prior.lambda * static_cast<double>(n));
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  C.selfadjointView<Eigen::Lower>().rankUpdate(B, prior_var);
  C.diagonal().array() += prior.sigma2;
  const auto llt = checked_llt(C, "log_marginal_exact");
  const double quad = llt.matrixL().solve(Y).squaredNorm();
  return -0.5 * (quad + log_det_from_llt(llt) + static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
}

double log_marginal_exact(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                          int n) {
  detail::require(B.rows() == n, "log_marginal_exact: B row count differs from n");
  return log_marginal_exact(B, Y, prior);
}

}  // namespace gibbsic
