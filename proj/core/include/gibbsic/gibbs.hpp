#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gibbsic/rng.hpp"

namespace gibbsic {

/// Isotropic Gaussian prior w ~ N(0, sigma2/(lambda n) I_p).
struct GaussianPrior {
  double lambda = 0.0;
  double sigma2 = 0.0;
  int p = 0;

  double variance(int n) const { return sigma2 / (lambda * static_cast<double>(n)); }
  void validate() const;
};

/// Gaussian Gibbs posterior of the RF model at inverse temperature beta = n:
///   mean       W = (lambda n I + B^T B)^{-1} B^T Y
///   covariance S = sigma2 (lambda n I + B^T B)^{-1}.
///
/// The p x p precision A = lambda n I + B^T B is held as a Cholesky factor and the
/// spectrum of B^T B is cached (computed from the smaller of the two Gram
/// matrices), so scalar functionals never need an explicit p x p inverse.
class GibbsPosterior {
 public:
  const Eigen::VectorXd& mean() const { return mean_; }
  double lambda() const { return lambda_; }
  double sigma2() const { return sigma2_; }
  int n() const { return n_; }
  int p() const { return static_cast<int>(mean_.size()); }
  double ridge() const { return lambda_ * n_; }  ///< lambda n

  /// Eigenvalues of B^T B, ascending, length p (zeros padded when p > n).
  const Eigen::VectorXd& gram_spectrum() const { return spectrum_; }
  const Eigen::LLT<Eigen::MatrixXd>& precision_factor() const { return llt_; }

  /// Dense sigma2 A^{-1}. O(p^3); only for tests and small problems.
  Eigen::MatrixXd covariance() const;
  /// Dense A / sigma2.
  Eigen::MatrixXd precision() const;

  /// log det of the covariance, from the Cholesky diagonal.
  double log_det_covariance() const;
  /// log det(I + B^T B / (lambda n)), from the Cholesky diagonal.
  double log_det_normalized_precision() const;
  double trace_covariance() const;
  /// tr(B S B^T) = sigma2 * sum mu / (lambda n + mu).
  double trace_fitted_covariance() const;
  /// ||Y - B W||^2, ||B W||^2 and ||B||_F^2 at construction.
  double residual_sq() const { return resid_sq_; }
  double fitted_sq() const { return fitted_sq_; }
  double design_frobenius_sq() const { return frob_sq_; }
  double condition_number() const;

  /// One exact draw W + sigma L^{-T} z.
  Eigen::VectorXd sample(Rng& rng) const;

  /// Closed-form E[L_E(W, z^n)] under this posterior, with the log-loss evaluated
  /// at `sigma2_eval` (normally the posterior's own sigma2):
  ///   ||Y - B W||^2/(2 s n) + tr(B S B^T)/(2 s n) + log(2 pi s)/2.
  double expected_logloss(double sigma2_eval) const;
  double expected_logloss() const { return expected_logloss(sigma2_); }

  /// E[(1/m) sum log-loss] over this posterior on another sample (B_new, Y_new):
  ///   (||Y_new - B_new W||^2 + tr(B_new S B_new^T)) / (2 s m) + log(2 pi s)/2.
  double expected_logloss_on(const Eigen::MatrixXd& B_new, const Eigen::VectorXd& Y_new, double sigma2_eval) const;
  double expected_logloss_on(const Eigen::MatrixXd& B_new, const Eigen::VectorXd& Y_new) const {
    return expected_logloss_on(B_new, Y_new, sigma2_);
  }

  /// Closed-form E||W||^2 = ||W_mean||^2 + tr S.
  double expected_norm2() const { return mean_.squaredNorm() + trace_covariance(); }

 private:
  friend GibbsPosterior posterior(const Eigen::MatrixXd&, const Eigen::VectorXd&, const GaussianPrior&);

  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd spectrum_;
  double lambda_ = 0.0;
  double sigma2_ = 0.0;
  int n_ = 0;
  double resid_sq_ = 0.0;
  double fitted_sq_ = 0.0;
  double frob_sq_ = 0.0;
};

/// Fits the posterior by Cholesky of lambda n I + B^T B. Throws NumericalError
/// (with the smallest pivot) if the factorization fails; logs a warning when the
/// condition number exceeds 1e12.
GibbsPosterior posterior(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior);
/// As above, checking that B has `n` rows.
GibbsPosterior posterior(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior, int n);

/// Same Gaussian family at inverse temperature beta instead of n: the density
/// pi(w) exp(-beta L_E) equals the beta = n posterior with lambda and sigma2 both
/// divided by beta / n.
GibbsPosterior tempered_posterior(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y,
                                  const GaussianPrior& prior, double beta);

/// KL(N(mean1, cov1) || N(mean2, cov2)) with Cholesky log-determinants.
double gaussian_kl(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1,
                   const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2);

/// D(P* || pi).
double kl_posterior_prior(const GibbsPosterior& post, const GaussianPrior& prior);
/// D(pi || P*).
double kl_prior_posterior(const GibbsPosterior& post, const GaussianPrior& prior);

/// E_pi[L_E(W, z^n)] = (||Y||^2 + (sigma2/(lambda n)) ||B||_F^2)/(2 sigma2 n) + log(2 pi sigma2)/2.
double prior_expected_risk(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior);
double prior_expected_risk(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior, int n);

/// log m(z^n) = log N(Y; 0, sigma2 I_n + (sigma2/(lambda n)) B B^T), by an n x n Cholesky.
/// Requires n <= 2000.
double log_marginal_exact(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior);
double log_marginal_exact(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior, int n);

/// Eigenvalues of B^T B (length p, ascending, clipped at zero), computed from the
/// smaller Gram matrix.
Eigen::VectorXd gram_spectrum(const Eigen::MatrixXd& B);

}  // namespace gibbsic
