#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gibbsic {

enum class ActivationKind { CenteredQuadratic, ReLU, Sigmoid, Custom };

/// Gaussian moments of an activation f under eps ~ N(0, 1).
struct ActivationMoments {
  double mean = 0.0;         ///< E[f(eps)]
  double second = 0.0;       ///< E[f(eps)^2]; the "eta" constant of the nonlinear spectrum
  double mean_deriv = 0.0;   ///< E[f'(eps)]
  double xi() const { return mean_deriv * mean_deriv; }
  double variance() const { return second - mean * mean; }
};

/// Pointwise activation. CenteredQuadratic is f(x) = (x^2 - 1)/sqrt(2), which has
/// zero mean, unit second moment and zero mean derivative under N(0, 1). ReLU and
/// Sigmoid are the raw, un-centered functions; `standardized()` yields the affine
/// rescaling (f - E f)/sd(f) when a zero-mean unit-variance variant is wanted.
class Activation {
 public:
  using Fn = std::function<double(double)>;

  static Activation centered_quadratic();
  static Activation relu();
  static Activation sigmoid();
  /// `deriv` may be empty; a central difference is used in that case.
  static Activation custom(std::string name, Fn fn, Fn deriv = {});
  /// Parses "centered_quadratic", "relu", "sigmoid", and the "_std" suffixed
  /// standardized variants ("relu_std", "sigmoid_std").
  static Activation from_name(const std::string& name);

  ActivationKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool is_standardized() const { return standardized_; }

  double operator()(double x) const { return scale_ * (raw(x) - shift_); }
  double derivative(double x) const { return scale_ * raw_deriv(x); }

  /// Elementwise application, in place.
  void apply_inplace(Eigen::MatrixXd& m) const;

  /// (f - E f)/sd(f); idempotent up to quadrature error.
  Activation standardized() const;

  ActivationMoments moments() const;

  /// True when |E f|, |E f^2 - 1| and |E f'| are all below `tol`.
  bool satisfies_moment_conditions(double tol = 1e-8) const;

 private:
  Activation(ActivationKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  double raw(double x) const;
  double raw_deriv(double x) const;

  ActivationKind kind_;
  std::string name_;
  Fn fn_;
  Fn deriv_;
  double shift_ = 0.0;
  double scale_ = 1.0;
  bool standardized_ = false;
};

/// E[g(eps)] for eps ~ N(0, 1) by adaptive Gauss-Kronrod on (-inf, 0] and [0, inf).
/// Splitting at zero keeps kinks such as ReLU's from degrading accuracy.
double gaussian_expectation(const std::function<double(double)>& g);

/// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)/sqrt(2 pi)), normalized so
/// weights sum to one. Exact for polynomials of degree <= 2n - 1. Golub-Welsch.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite_rule(int n);

}  // namespace gibbsic
