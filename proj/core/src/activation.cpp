#include "gibbsic/activation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gibbsic/error.hpp"

namespace gibbsic {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

double sigmoid_fn(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

Activation Activation::centered_quadratic() {
  return Activation(ActivationKind::CenteredQuadratic, "centered_quadratic");
}
Activation Activation::relu() { return Activation(ActivationKind::ReLU, "relu"); }
Activation Activation::sigmoid() { return Activation(ActivationKind::Sigmoid, "sigmoid"); }

Activation Activation::custom(std::string name, Fn fn, Fn deriv) {
  detail::require(static_cast<bool>(fn), "custom activation requires a function");
  Activation a(ActivationKind::Custom, std::move(name));
  a.fn_ = std::move(fn);
  a.deriv_ = std::move(deriv);
  return a;
}

Activation Activation::from_name(const std::string& name) {
  if (name == "centered_quadratic") return centered_quadratic();
  if (name == "relu") return relu();
  if (name == "sigmoid") return sigmoid();
  if (name == "relu_std") return relu().standardized();
  if (name == "sigmoid_std") return sigmoid().standardized();
  throw ValidationError("unknown activation '" + name + "'");
}

double Activation::raw(double x) const {
  switch (kind_) {
    case ActivationKind::CenteredQuadratic: return (x * x - 1.0) * kInvSqrt2;
    case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
    case ActivationKind::Sigmoid: return sigmoid_fn(x);
    case ActivationKind::Custom: return fn_(x);
  }
  return 0.0;
}

double Activation::raw_deriv(double x) const {
  switch (kind_) {
    case ActivationKind::CenteredQuadratic: return 2.0 * x * kInvSqrt2;
    case ActivationKind::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Sigmoid: {
      const double s = sigmoid_fn(x);
      return s * (1.0 - s);
    }
    case ActivationKind::Custom: {
      if (deriv_) return deriv_(x);
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      return (fn_(x + h) - fn_(x - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

void Activation::apply_inplace(Eigen::MatrixXd& m) const {
  auto a = m.array();
  switch (kind_) {
    case ActivationKind::CenteredQuadratic: a = (a.square() - 1.0) * kInvSqrt2; break;
    case ActivationKind::ReLU: a = a.max(0.0); break;
    case ActivationKind::Sigmoid: a = a.unaryExpr([](double x) { return sigmoid_fn(x); }); break;
    case ActivationKind::Custom: a = a.unaryExpr([this](double x) { return fn_(x); }); break;
  }
  if (shift_ != 0.0 || scale_ != 1.0) a = scale_ * (a - shift_);
}

Activation Activation::standardized() const {
  const ActivationMoments mom = moments();
  const double sd = std::sqrt(mom.variance());
  if (!(sd > 0.0)) throw NumericalError("cannot standardize a constant activation '" + name_ + "'");
  Activation out = *this;
  // Compose with the current affine map: scale' * (raw - shift').
  out.shift_ = shift_ + mom.mean / scale_;
  out.scale_ = scale_ / sd;
  out.standardized_ = true;
  if (!standardized_) out.name_ = name_ + "_std";
  return out;
}

ActivationMoments Activation::moments() const {
  ActivationMoments m;
  m.mean = gaussian_expectation([this](double x) { return (*this)(x); });
  m.second = gaussian_expectation([this](double x) {
    const double v = (*this)(x);
    return v * v;
  });
  m.mean_deriv = gaussian_expectation([this](double x) { return derivative(x); });
  return m;
}

bool Activation::satisfies_moment_conditions(double tol) const {
  const ActivationMoments m = moments();
  return std::abs(m.mean) < tol && std::abs(m.second - 1.0) < tol && std::abs(m.mean_deriv) < tol;
}

double gaussian_expectation(const std::function<double(double)>& g) {
  using boost::math::quadrature::gauss_kronrod;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double x) { return g(x) * norm * std::exp(-0.5 * x * x); };
  const double inf = std::numeric_limits<double>::infinity();
  const double left = gauss_kronrod<double, 61>::integrate(integrand, -inf, 0.0, 15, 1e-14);
  const double right = gauss_kronrod<double, 61>::integrate(integrand, 0.0, inf, 15, 1e-14);
  return left + right;
}

QuadratureRule gauss_hermite_rule(int n) {
  detail::require(n >= 1, "gauss_hermite_rule: n must be >= 1");
  // Jacobi matrix of the monic probabilists' Hermite recurrence: off-diagonal sqrt(k).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    J(k, k - 1) = std::sqrt(static_cast<double>(k));
    J(k - 1, k) = J(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

}  // namespace gibbsic
