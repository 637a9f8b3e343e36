#pragma once

#include <complex>
#include <functional>
#include <optional>

#include <Eigen/Core>

namespace gibbsic::rmt {

/// r = p/n, optionally with r1 = p/d and r2 = n/d (r = r1/r2).
struct ShapeRatio {
  double r = 1.0;
  std::optional<double> r1;
  std::optional<double> r2;

  static ShapeRatio from_sizes(int p, int n);
  static ShapeRatio from_sizes(int p, int n, int d);
  void validate() const;
};

/// Marchenko-Pastur law with ratio r: support [a, b] and an atom (1 - 1/r)^+ at zero.
struct MPLaw {
  double r = 1.0;
  double a = 0.0;
  double b = 4.0;
  double point_mass = 0.0;

  explicit MPLaw(double ratio);
};

/// Continuous part of the MP density. Throws ValidationError for x < 0 or r <= 0.
double mp_density(double x, double r);
double mp_point_mass(double r);

/// Integral of g against MP(r): the continuous part by Gauss-Kronrod after the
/// change of variables x = a + (b - a)(1 - cos t)/2 (which removes the square-root
/// endpoint behaviour), plus g(0) times the atom.
double mp_expectation(double r, const std::function<double(double)>& g, double tol = 1e-12);

/// F(gamma, r) = (sqrt(gamma (1 + sqrt r)^2 + 1) - sqrt(gamma (1 - sqrt r)^2 + 1))^2,
/// evaluated through the conjugate form 16 gamma^2 r / (s+ + s-)^2.
double f_func(double gamma, double r);
/// E[1 / (1 + gamma X)] under MP(r) = 1 - F / (4 r gamma).
double eta_transform(double gamma, double r);
/// E[log(1 + gamma X)] under MP(r).
double shannon_transform(double gamma, double r);
/// V(gamma, r) = r log(1 + gamma - F/4) + log(1 + gamma r - F/4) - F/(4 gamma) = r * shannon.
double v_func(double gamma, double r);

/// Quadrature oracles for the two transforms.
double eta_transform_quadrature(double gamma, double r);
double shannon_transform_quadrature(double gamma, double r);

/// (1/(2n)) [log det(I + B^T B/(lambda n)) + tr((I + B^T B/(lambda n))^{-1}) - p],
/// from the eigenvalues of the Gram matrix.
double covariance_term_finite(const Eigen::MatrixXd& B, double lambda, int n);
/// Same, from a precomputed spectrum of B^T B (length p).
double covariance_term_from_spectrum(const Eigen::VectorXd& gram_eigenvalues, double lambda, int n);
/// Asymptotic value (1/2) V(1/lambda, r) - (lambda/8) F(1/lambda, r).
double covariance_term_asymptotic(double lambda, double r);

/// (1/n) tr((I + B^T B/(lambda n))^{-1}) and its limit r - lambda F(1/lambda, r)/4.
double trace_term_finite(const Eigen::VectorXd& gram_eigenvalues, double lambda, int n);
double trace_term_asymptotic(double lambda, double r);

/// Limit of (1/n) KL(P* || pi):
///   lambda/(2 sigma2) ||W_lambda||^2 - (lambda/8) F(1/lambda, r) + (1/2) V(1/lambda, r).
double kl_asymptotic(double lambda, double sigma2, double r, double w_lambda_norm2);

/// Parameters of the nonlinear random-feature spectrum: psi = d/p, phi = d/n and
/// the activation moments eta = E[f^2], xi = E[f']^2.
struct StieltjesParams {
  double psi = 1.0;
  double phi = 1.0;
  double eta_mom = 1.0;
  double xi_mom = 0.0;

  static StieltjesParams from_sizes(int d, int p, int n, double eta_mom, double xi_mom);
  void validate() const;
};

struct StieltjesResult {
  std::complex<double> G;
  std::complex<double> A;
  double residual = 0.0;
  int iterations = 0;
  bool used_continuation = false;
};

/// Stieltjes transform G(z) = E[1/(z - X)] of the limiting spectrum of B^T B / n, so
/// G(z) ~ 1/z at infinity and the density is Im G(x - i eps)/pi.
///
/// Solves A(t) = 1 + (eta - xi) t A_phi A_psi + A_phi A_psi t xi / (1 - A_phi A_psi t xi)
/// with A_phi = 1 + (A - 1) phi, A_psi = 1 + (A - 1) psi, at t = 1/(z psi). The damped
/// iteration (factor 0.5, from A = 1) is tried first; it is repelling inside the
/// bulk, where the solver instead follows the root by Newton steps along
/// z_k = Re z - i eps_k with eps_k shrinking to -Im z. Throws ConvergenceError
/// (with the last residual) if neither path reaches `tol`.
StieltjesResult stieltjes_general(std::complex<double> z, const StieltjesParams& params, double tol = 1e-10,
                                  int max_iter = 10000);

/// (1/pi) Im G(x - i eps).
double stieltjes_density(double x, const StieltjesParams& params, double eps = 1e-8);

}  // namespace gibbsic::rmt
