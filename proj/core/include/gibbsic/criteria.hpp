#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gibbsic/data_gen.hpp"
#include "gibbsic/gibbs.hpp"
#include "gibbsic/rf_model.hpp"
#include "gibbsic/samplers.hpp"

namespace gibbsic {

/// One (p, seed) row of a sweep. All criteria are per-sample (scaled by 1/n, not x2).
struct CriterionReport {
  int p = 0;
  int n = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;

  double train_mse = 0.0;
  double test_mse = 0.0;
  double train_logloss = 0.0;

  double aic = 0.0;
  double bic = 0.0;
  double aic_plus = 0.0;
  double bic_plus_exact = 0.0;
  double bic_minus_exact = 0.0;
  double bic_plus_over = 0.0;
  double bic_minus_over = 0.0;
  double wbic = 0.0;  ///< baseline from outside this method family

  double l2_term = 0.0;
  double cov_term = 0.0;
  double kl_post_prior = 0.0;  ///< (1/n) D(P* || pi)
  double kl_prior_post = 0.0;  ///< (1/n) D(pi || P*)
  double i_skl = 0.0;
  double gen_err = 0.0;
  double wallclock_ms = 0.0;

  bool failed = false;
  std::string error;

  bool all_finite() const;
};

/// Numeric CSV columns in schema order, with accessors.
inline constexpr std::array<std::string_view, 20> kReportColumns = {
    "p",        "seed",           "train_mse",      "test_mse",      "train_logloss", "aic",    "bic",
    "aic_plus", "bic_plus_exact", "bic_minus_exact", "bic_plus_over", "bic_minus_over", "wbic", "l2_term",
    "cov_term", "kl_post_prior",  "kl_prior_post",  "i_skl",         "gen_err",       "wallclock_ms"};

/// Value of a named column. Throws ValidationError for unknown names.
double report_field(const CriterionReport& r, std::string_view name);
void set_report_field(CriterionReport& r, std::string_view name, double value);

// Classical criteria -------------------------------------------------------

/// -loglik/n + p/n
double aic_classical(double loglik_hat, int n, int p);
/// -loglik/n + p log(n)/(2n)
double bic_classical(double loglik_hat, int n, int p);

/// Least-squares (minimum-norm when rank deficient) fit with a fixed noise variance.
struct ClassicalFit {
  double rss = 0.0;
  double loglik = 0.0;  ///< total Gaussian log-likelihood at the fit
  int k = 0;            ///< parameter count used by AIC/BIC (= p)
};
ClassicalFit classical_fit(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, double sigma2);
/// RSS / (n - p) of the least-squares fit; requires p < n.
double unbiased_residual_variance(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y);

// Gibbs-based criteria -----------------------------------------------------

/// L_E + i_skl / beta
double aic_plus(double le_gibbs, double i_skl, double beta);
/// L_E + (1/n) D(P* || pi); `kl_post_prior` is the unscaled divergence.
double bic_plus_exact(double le_gibbs, double kl_post_prior, int n);
/// E_pi[L_E] - (1/n) D(pi || P*)
double bic_minus_exact(double prior_risk, double kl_prior_post, int n);

struct OverDecomposition {
  double value = 0.0;
  double l2_term = 0.0;          ///< lambda/(2 sigma2) ||W_lambda||^2
  double covariance_term = 0.0;  ///< (1/2) V(1/lambda, r) - (lambda/8) F(1/lambda, r)
};
/// L_E + l2 term + covariance term.
OverDecomposition bic_plus_over(double le_gibbs, double w_lambda_norm2, double lambda, double sigma2, double r);
/// E_pi[L_E] - W^T S^{-1} W/(2n) - tr(I + B^T B/(lambda n))/(2n) + V(1/lambda, r)/2 + p/(2n),
/// with W, S and B taken from `post`.
double bic_minus_over(double prior_risk, const GibbsPosterior& post, double r);

/// WBIC baseline: posterior-averaged L_E at inverse temperature n / log n.
/// Closed form through the conjugate tempered posterior.
double wbic_closed_form(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior);
/// Same functional estimated with MALA at the tempered temperature.
ScalarEstimate wbic_sampled(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, const GaussianPrior& prior,
                            const SamplerSettings& settings);

// Symmetrized KL information -----------------------------------------------

/// One training set with a held-out sample standing in for the population.
struct Replicate {
  Eigen::MatrixXd B;
  Eigen::VectorXd Y;
  Eigen::MatrixXd B_hold;
  Eigen::VectorXd Y_hold;
};
using ReplicateGenerator = std::function<Replicate(int index)>;

enum class ISklMethod {
  ClosedForm,  ///< exact posterior expectations of L_P and L_E per replicate
  Mala,        ///< MALA draw averages per replicate
};

struct ISklOptions {
  int replicates = 50;
  ISklMethod method = ISklMethod::ClosedForm;
  SamplerSettings sampler;  ///< used by Mala; the seed is re-derived per replicate
};

struct ISklEstimate {
  double i_skl = 0.0;
  double gen_error = 0.0;
  double std_error = 0.0;  ///< of i_skl, across replicates
  int replicates = 0;
  std::vector<double> per_replicate_gen;
};

/// gen = mean over replicates of E_{P*}[L_P] - E_{P*}[L_E]; i_skl = beta * gen with
/// beta = n. Throws ValidationError for fewer than 2 replicates.
ISklEstimate i_skl_estimate(const ReplicateGenerator& gen, const GaussianPrior& prior, const ISklOptions& opts);

/// Generalization gap of one replicate, closed form.
double gen_gap_closed_form(const Replicate& rep, const GibbsPosterior& post);

/// Replicates for the RF model: dataset k uses seed derive_seed(base_seed, {k}) and a
/// holdout of size m_hold drawn from the teacher.
ReplicateGenerator rf_replicates(const TeacherModel& teacher, const RFModel& model, int n, int m_hold,
                                 std::uint64_t base_seed);

// Selection ------------------------------------------------------------------

struct Selection {
  std::size_t index = 0;
  int p = 0;
  double value = 0.0;
};

/// argmin of the named column; ties go to the smaller p. Throws ValidationError
/// on an empty list, an unknown column or a non-finite value.
Selection select_model(const std::vector<CriterionReport>& reports, std::string_view criterion);
/// Same over a bare curve.
Selection select_model(const std::vector<int>& ps, const std::vector<double>& values);

}  // namespace gibbsic
