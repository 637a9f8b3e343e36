#include "gibbsic/rmt.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gibbsic/error.hpp"
#include "gibbsic/gibbs.hpp"

namespace gibbsic::rmt {

namespace {

using cd = std::complex<double>;

void require_ratio(double r, const char* who) {
  detail::require(r > 0.0 && std::isfinite(r), std::string(who) + ": r must be positive");
}

void require_gamma(double gamma, const char* who) {
  detail::require(gamma >= 0.0 && std::isfinite(gamma), std::string(who) + ": gamma must be non-negative");
}

}  // namespace

ShapeRatio ShapeRatio::from_sizes(int p, int n) {
  detail::require(p > 0 && n > 0, "ShapeRatio: sizes must be positive");
  ShapeRatio s;
  s.r = static_cast<double>(p) / n;
  return s;
}

ShapeRatio ShapeRatio::from_sizes(int p, int n, int d) {
  detail::require(p > 0 && n > 0 && d > 0, "ShapeRatio: sizes must be positive");
  ShapeRatio s = from_sizes(p, n);
  s.r1 = static_cast<double>(p) / d;
  s.r2 = static_cast<double>(n) / d;
  return s;
}

void ShapeRatio::validate() const {
  require_ratio(r, "ShapeRatio");
  detail::require(r1.has_value() == r2.has_value(), "ShapeRatio: r1 and r2 must be given together");
  if (r1) {
    detail::require(*r1 > 0.0 && *r2 > 0.0, "ShapeRatio: r1 and r2 must be positive");
    detail::require(std::abs(r - *r1 / *r2) < 1e-12, "ShapeRatio: r differs from r1 / r2");
  }
}

MPLaw::MPLaw(double ratio) : r(ratio) {
  require_ratio(ratio, "MPLaw");
  const double s = std::sqrt(ratio);
  a = (1.0 - s) * (1.0 - s);
  b = (1.0 + s) * (1.0 + s);
  point_mass = mp_point_mass(ratio);
}

double mp_point_mass(double r) {
  require_ratio(r, "mp_point_mass");
  return std::max(0.0, 1.0 - 1.0 / r);
}

double mp_density(double x, double r) {
  require_ratio(r, "mp_density");
  detail::require(x >= 0.0, "mp_density: x must be non-negative");
  if (x == 0.0) return 0.0;
  const MPLaw law(r);
  const double prod = std::max(0.0, x - law.a) * std::max(0.0, law.b - x);
  return std::sqrt(prod) / (2.0 * std::numbers::pi * r * x);
}

double mp_expectation(double r, const std::function<double(double)>& g, double tol) {
  const MPLaw law(r);
  const double half = 0.5 * (law.b - law.a);
  // x = a + half (1 - cos t): dx = half sin t dt and sqrt((x - a)(b - x)) = half sin t.
  auto integrand = [&](double t) {
    const double st = std::sin(t);
    const double x = law.a + half * (1.0 - std::cos(t));
    if (x <= 0.0) {
      // Only reachable when r = 1 and t = 0: sin^2 t / x -> 1 / half.
      return g(0.0) * half / (2.0 * std::numbers::pi * r);
    }
    return g(x) * half * half * st * st / (2.0 * std::numbers::pi * r * x);
  };
  double err = 0.0;
  const double cont = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numbers::pi, 15, tol, &err);
  return cont + (law.point_mass > 0.0 ? law.point_mass * g(0.0) : 0.0);
}

double f_func(double gamma, double r) {
  require_gamma(gamma, "f_func");
  require_ratio(r, "f_func");
  const double sr = std::sqrt(r);
  const double sp = std::sqrt(gamma * (1.0 + sr) * (1.0 + sr) + 1.0);
  const double sm = std::sqrt(gamma * (1.0 - sr) * (1.0 - sr) + 1.0);
  // sp - sm = 4 gamma sqrt(r) / (sp + sm)
  const double diff = 4.0 * gamma * sr / (sp + sm);
  return diff * diff;
}

double eta_transform(double gamma, double r) {
  require_gamma(gamma, "eta_transform");
  require_ratio(r, "eta_transform");
  if (gamma == 0.0) return 1.0;
  return 1.0 - f_func(gamma, r) / (4.0 * r * gamma);
}

double shannon_transform(double gamma, double r) {
  require_gamma(gamma, "shannon_transform");
  require_ratio(r, "shannon_transform");
  if (gamma == 0.0) return 0.0;
  const double F = f_func(gamma, r);
  return std::log(1.0 + gamma - 0.25 * F) + std::log(1.0 + gamma * r - 0.25 * F) / r - F / (4.0 * r * gamma);
}

double v_func(double gamma, double r) {
  require_gamma(gamma, "v_func");
  require_ratio(r, "v_func");
  if (gamma == 0.0) return 0.0;
  const double F = f_func(gamma, r);
  return r * std::log(1.0 + gamma - 0.25 * F) + std::log(1.0 + gamma * r - 0.25 * F) - F / (4.0 * gamma);
}

double eta_transform_quadrature(double gamma, double r) {
  require_gamma(gamma, "eta_transform_quadrature");
  return mp_expectation(r, [gamma](double x) { return 1.0 / (1.0 + gamma * x); });
}

double shannon_transform_quadrature(double gamma, double r) {
  require_gamma(gamma, "shannon_transform_quadrature");
  return mp_expectation(r, [gamma](double x) { return std::log1p(gamma * x); });
}

double covariance_term_from_spectrum(const Eigen::VectorXd& mu, double lambda, int n) {
  detail::require(lambda > 0.0, "covariance_term: lambda must be positive");
  detail::require(n > 0, "covariance_term: n must be positive");
  const double ridge = lambda * n;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double x = std::max(mu[i], 0.0) / ridge;
    // log(1 + x) + 1/(1 + x) - 1
    acc += std::log1p(x) - x / (1.0 + x);
  }
  return acc / (2.0 * n);
}

double covariance_term_finite(const Eigen::MatrixXd& B, double lambda, int n) {
  detail::require(B.rows() == n, "covariance_term_finite: B must have n rows");
  return covariance_term_from_spectrum(gram_spectrum(B), lambda, n);
}

double covariance_term_asymptotic(double lambda, double r) {
  detail::require(lambda > 0.0, "covariance_term_asymptotic: lambda must be positive");
  const double gamma = 1.0 / lambda;
  return 0.5 * v_func(gamma, r) - 0.125 * lambda * f_func(gamma, r);
}

double trace_term_finite(const Eigen::VectorXd& mu, double lambda, int n) {
  detail::require(lambda > 0.0 && n > 0, "trace_term_finite: lambda and n must be positive");
  const double ridge = lambda * n;
  return (ridge / (mu.array().max(0.0) + ridge)).sum() / n;
}

double trace_term_asymptotic(double lambda, double r) {
  detail::require(lambda > 0.0, "trace_term_asymptotic: lambda must be positive");
  return r - 0.25 * lambda * f_func(1.0 / lambda, r);
}

double kl_asymptotic(double lambda, double sigma2, double r, double w_lambda_norm2) {
  detail::require(lambda > 0.0 && sigma2 > 0.0, "kl_asymptotic: lambda and sigma2 must be positive");
  detail::require(w_lambda_norm2 >= 0.0, "kl_asymptotic: norm must be non-negative");
  return lambda / (2.0 * sigma2) * w_lambda_norm2 + covariance_term_asymptotic(lambda, r);
}

StieltjesParams StieltjesParams::from_sizes(int d, int p, int n, double eta_mom, double xi_mom) {
  detail::require(d > 0 && p > 0 && n > 0, "StieltjesParams: sizes must be positive");
  StieltjesParams s;
  s.psi = static_cast<double>(d) / p;
  s.phi = static_cast<double>(d) / n;
  s.eta_mom = eta_mom;
  s.xi_mom = xi_mom;
  return s;
}

void StieltjesParams::validate() const {
  detail::require(psi > 0.0 && phi > 0.0, "StieltjesParams: psi and phi must be positive");
  detail::require(eta_mom > 0.0, "StieltjesParams: eta must be positive");
  detail::require(xi_mom >= 0.0, "StieltjesParams: xi must be non-negative");
}

namespace {

struct FixedPointMap {
  const StieltjesParams& p;
  cd t;

  cd q(cd A) const { return t * (1.0 + (A - 1.0) * p.phi) * (1.0 + (A - 1.0) * p.psi); }
  cd operator()(cd A) const {
    const cd qa = q(A);
    return 1.0 + (p.eta_mom - p.xi_mom) * qa + qa * p.xi_mom / (1.0 - qa * p.xi_mom);
  }
  cd derivative(cd A) const {
    const cd dq = t * (p.phi * (1.0 + (A - 1.0) * p.psi) + p.psi * (1.0 + (A - 1.0) * p.phi));
    const cd denom = 1.0 - q(A) * p.xi_mom;
    return ((p.eta_mom - p.xi_mom) + p.xi_mom / (denom * denom)) * dq;
  }
  double residual(cd A) const { return std::abs((*this)(A) - A); }
};

bool newton_solve(const FixedPointMap& map, cd& A, double tol, int max_iter, int& iters) {
  for (int k = 0; k < max_iter; ++k, ++iters) {
    const cd R = map(A) - A;
    if (!std::isfinite(std::abs(R))) return false;
    if (std::abs(R) < tol) return true;
    const cd dR = map.derivative(A) - 1.0;
    if (std::abs(dR) == 0.0) return false;
    cd step = R / dR;
    const double cap = 0.5 * std::max(1.0, std::abs(A));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    A -= step;
  }
  return map.residual(A) < tol;
}

cd g_from_a(cd z, cd A, double psi) { return psi / z * A + (1.0 - psi) / z; }

}  // namespace

StieltjesResult stieltjes_general(std::complex<double> z, const StieltjesParams& params, double tol, int max_iter) {
  params.validate();
  detail::require(tol > 0.0, "stieltjes_general: tol must be positive");
  detail::require(max_iter > 0, "stieltjes_general: max_iter must be positive");
  detail::require(std::abs(z) > 0.0, "stieltjes_general: z must be non-zero");

  StieltjesResult res;
  {
    const FixedPointMap map{params, 1.0 / (z * params.psi)};
    cd A = 1.0;
    for (int k = 0; k < max_iter; ++k) {
      const cd next = map(A);
      const double step = std::abs(next - A);
      A = 0.5 * A + 0.5 * next;
      res.iterations = k + 1;
      if (!std::isfinite(step)) break;
      if (step < tol) {
        const double r = map.residual(A);
        // The damped map can settle on the unphysical root; accept only if the
        // resulting density is non-negative.
        const cd G = g_from_a(z, A, params.psi);
        if (r < tol && (z.imag() == 0.0 || G.imag() * -z.imag() >= -tol)) {
          res.A = A;
          res.G = G;
          res.residual = r;
          return res;
        }
        break;
      }
    }
  }

  // Continuation in the imaginary part: far from the real axis the physical root
  // is the one near A = 1, and Newton tracks it as eps decreases.
  res.used_continuation = true;
  const double x = z.real();
  const double target = std::abs(z.imag());
  const double sign = z.imag() < 0.0 ? -1.0 : 1.0;
  double eps = std::max(10.0, 2.0 * std::abs(z));
  cd A = 1.0;
  int iters = 0;
  for (;;) {
    const cd zk(x, sign * eps);
    const FixedPointMap map{params, 1.0 / (zk * params.psi)};
    if (!newton_solve(map, A, tol, 100, iters) || iters > max_iter) {
      std::ostringstream msg;
      msg << "stieltjes_general: no convergence at z = (" << z.real() << ", " << z.imag() << "), eps = " << eps;
      throw ConvergenceError(msg.str(), map.residual(A));
    }
    if (eps <= target) break;
    eps = std::max(0.7 * eps, target);
  }
  const FixedPointMap map{params, 1.0 / (z * params.psi)};
  res.A = A;
  res.G = g_from_a(z, A, params.psi);
  res.residual = map.residual(A);
  res.iterations += iters;
  return res;
}

double stieltjes_density(double x, const StieltjesParams& params, double eps) {
  detail::require(eps > 0.0, "stieltjes_density: eps must be positive");
  const auto res = stieltjes_general({x, -eps}, params);
  return std::max(0.0, res.G.imag() / std::numbers::pi);
}

}  // namespace gibbsic::rmt
