#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gibbsic/activation.hpp"
#include "gibbsic/error.hpp"
#include "gibbsic/gibbs.hpp"
#include "gibbsic/rf_model.hpp"
#include "gibbsic/rmt.hpp"

using namespace gibbsic;
using namespace gibbsic::rmt;

namespace {

// Independent oracle: tanh-sinh on the raw MP density plus the atom.
double mp_oracle(double r, const std::function<double(double)>& g) {
  const double a = std::pow(1.0 - std::sqrt(r), 2), b = std::pow(1.0 + std::sqrt(r), 2);
  auto dens = [r, a, b](double x) { return std::sqrt(std::max((b - x) * (x - a), 0.0)) / (2.0 * std::numbers::pi * r * x); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double cont = ts.integrate([&](double x) { return g(x) * dens(x); }, a, b);
  return cont + std::max(0.0, 1.0 - 1.0 / r) * g(0.0);
}

double mp_cdf_oracle(double r, double x) {
  const double a = std::pow(1.0 - std::sqrt(r), 2), b = std::pow(1.0 + std::sqrt(r), 2);
  const double atom = x >= 0.0 ? std::max(0.0, 1.0 - 1.0 / r) : 0.0;
  if (x <= a) return atom;
  if (x >= b) return 1.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto dens = [r, a, b](double t) { return std::sqrt(std::max((b - t) * (t - a), 0.0)) / (2.0 * std::numbers::pi * r * t); };
  return atom + ts.integrate(dens, a, x);
}

Eigen::VectorXd normalized_spectrum(int n, int d, int p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {1}));
  const Eigen::MatrixXd X = rng.normal_matrix(n, d);
  const auto model = init_features(d, p, derive_seed(seed, {2}), Activation::centered_quadratic());
  return gram_spectrum(design_matrix(model, X).B) / n;
}

}  // namespace

TEST_CASE("MP support and atom") {
  const MPLaw one(1.0);
  CHECK(one.a == doctest::Approx(0.0));
  CHECK(one.b == doctest::Approx(4.0));
  CHECK(one.point_mass == 0.0);
  CHECK(mp_point_mass(2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(mp_density(-0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(mp_density(1.0, 0.0), ValidationError);
  CHECK(mp_density(5.0, 1.0) == 0.0);
}

TEST_CASE("MP total mass") {
  for (double r : {0.5, 1.0, 2.0, 5.0})
    CHECK(mp_expectation(r, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mp_oracle(0.5, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-8));
  // Mean of MP(r) is 1, second moment 1 + r.
  for (double r : {0.3, 3.0}) {
    CHECK(mp_expectation(r, [](double x) { return x; }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mp_expectation(r, [](double x) { return x * x; }) == doctest::Approx(1.0 + r).epsilon(1e-10));
  }
}

TEST_CASE("F function values") {
  CHECK(f_func(0.0, 2.0) == 0.0);
  CHECK(f_func(1.0, 1.0) == doctest::Approx(6.0 - 2.0 * std::sqrt(5.0)).epsilon(1e-15));
  CHECK(f_func(1.0, 1e-12) < 1e-10);
  // Conjugate form stays accurate where the direct difference cancels.
  const double g = 1e8, r = 0.25;
  const long double sp = std::sqrt(static_cast<long double>(g) * std::pow(1.5L, 2) + 1.0L);
  const long double sm = std::sqrt(static_cast<long double>(g) * std::pow(0.5L, 2) + 1.0L);
  CHECK(f_func(g, r) == doctest::Approx(static_cast<double>((sp - sm) * (sp - sm))).epsilon(1e-12));
}

TEST_CASE("eta and Shannon transforms") {
  CHECK(eta_transform(0.0, 1.0) == 1.0);
  CHECK(shannon_transform(0.0, 1.0) == 0.0);
  CHECK(v_func(0.0, 3.0) == 0.0);
  CHECK(eta_transform(1.0, 1.0) == doctest::Approx(1.0 - (6.0 - 2.0 * std::sqrt(5.0)) / 4.0).epsilon(1e-14));
  CHECK(eta_transform(1.0, 1.0) == doctest::Approx(0.6180339887498949).epsilon(1e-14));
  CHECK(eta_transform(1.0, 1.0) ==
        doctest::Approx(mp_oracle(1.0, [](double x) { return 1.0 / (1.0 + x); })).epsilon(1e-9));
  CHECK(shannon_transform(1.0, 1.0) ==
        doctest::Approx(mp_oracle(1.0, [](double x) { return std::log1p(x); })).epsilon(1e-9));
  for (double gamma : {0.05, 3.0, 40.0}) {
    for (double r : {0.2, 1.7, 6.0}) {
      CHECK(eta_transform(gamma, r) ==
            doctest::Approx(mp_oracle(r, [gamma](double x) { return 1.0 / (1.0 + gamma * x); })).epsilon(1e-8));
      CHECK(shannon_transform(gamma, r) ==
            doctest::Approx(mp_oracle(r, [gamma](double x) { return std::log1p(gamma * x); })).epsilon(1e-8));
      CHECK(std::abs(v_func(gamma, r) - r * shannon_transform(gamma, r)) < 1e-10);
    }
  }
}

TEST_CASE("Shannon transform grows with gamma") {
  double prev = 0.0;
  for (double gamma = 0.1; gamma < 1e4; gamma *= 3) {
    const double v = shannon_transform(gamma, 2.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("20 x 20 grid against quadrature") {
  double worst_eta = 0.0, worst_sh = 0.0, worst_id = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double gamma = std::pow(10.0, -2.0 + 4.0 * i / 19.0), r = std::pow(10.0, -1.0 + 2.0 * j / 19.0);
      worst_eta = std::max(worst_eta, std::abs(eta_transform(gamma, r) - eta_transform_quadrature(gamma, r)));
      worst_sh = std::max(worst_sh, std::abs(shannon_transform(gamma, r) - shannon_transform_quadrature(gamma, r)));
      worst_id = std::max(worst_id, std::abs(v_func(gamma, r) - r * shannon_transform(gamma, r)));
    }
  }
  CHECK(worst_eta < 1e-7);
  CHECK(worst_sh < 1e-7);
  CHECK(worst_id < 1e-10);
}

TEST_CASE("covariance term, scalar and empty cases") {
  CHECK(covariance_term_finite(Eigen::MatrixXd::Zero(5, 3), 0.1, 5) == 0.0);
  // p = 1 with B^T B / (lambda n) = 1.
  const int n = 4;
  const double lambda = 0.5;
  Eigen::MatrixXd B(n, 1);
  B.setConstant(std::sqrt(lambda * n / n));
  CHECK(covariance_term_finite(B, lambda, n) ==
        doctest::Approx((std::log(2.0) + 0.5 - 1.0) / (2.0 * n)).epsilon(1e-14));
}

TEST_CASE("covariance term against its limit for the centered quadratic") {
  const int n = 200, d = 400;
  for (double lambda : {0.1, 0.01}) {
    for (double r : {0.5, 3.0}) {
      const int p = static_cast<int>(r * n);
      double acc = 0.0;
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Eigen::VectorXd mu = normalized_spectrum(n, d, p, s) * n;
        acc += covariance_term_from_spectrum(mu, lambda, n);
      }
      const double finite = acc / 5, limit = covariance_term_asymptotic(lambda, r);
      CHECK(std::abs(finite - limit) / limit < 0.02);
    }
  }
}

TEST_CASE("covariance and trace terms stay close to their limits as n doubles") {
  // Finite-d corrections of a few 1e-3 remain for nonlinear features, so the
  // check is a tolerance at every size rather than a rate.
  const double lambda = 0.01;
  for (double r : {0.5, 2.0, 3.0}) {
    for (int n : {200, 400}) {
      const int d = 2 * n, p = static_cast<int>(r * n);
      double cov = 0.0, tr = 0.0;
      const int seeds = 4;
      for (std::uint64_t s = 0; s < seeds; ++s) {
        const Eigen::VectorXd mu = normalized_spectrum(n, d, p, 100 + s) * n;
        cov += covariance_term_from_spectrum(mu, lambda, n) / seeds;
        tr += trace_term_finite(mu, lambda, n) / seeds;
      }
      const double cov_limit = covariance_term_asymptotic(lambda, r);
      CHECK(std::abs(cov - cov_limit) / cov_limit < 0.02);
      // The trace term is close to max(r - 1, 0) + O(lambda); measure it on the scale r.
      CHECK(std::abs(tr - trace_term_asymptotic(lambda, r)) / r < 0.002);
    }
  }
}

TEST_CASE("spectrum of B^T B / n follows MP in KS distance") {
  for (int n : {200, 400}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const int p = static_cast<int>(r * n);
      Eigen::VectorXd ev = normalized_spectrum(n, 2 * n, p, 3);
      std::vector<double> xs(ev.data(), ev.data() + ev.size());
      std::sort(xs.begin(), xs.end());
      double ks = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i] < 1e-9 ? 0.0 : xs[i];
        const double c = mp_cdf_oracle(r, x);
        const double lo = static_cast<double>(i) / xs.size(), hi = static_cast<double>(i + 1) / xs.size();
        if (x == 0.0) {
          ks = std::max(ks, std::abs(hi - c) * (i + 1 < xs.size() && xs[i + 1] < 1e-9 ? 0.0 : 1.0));
          continue;
        }
        ks = std::max({ks, std::abs(c - lo), std::abs(c - hi)});
      }
      CHECK(ks <= 0.05);
    }
  }
}

TEST_CASE("KL limit") {
  CHECK(kl_asymptotic(0.1, 1.0, 1e-12, 0.0) == doctest::Approx(0.0).scale(1.0));
  const double a = kl_asymptotic(0.01, 0.0025, 3.0, 1.0), b = kl_asymptotic(0.01, 0.0025, 3.0, 2.0);
  CHECK(b - a == doctest::Approx(0.01 / (2 * 0.0025)).epsilon(1e-12));
}

TEST_CASE("KL limit against the finite posterior") {
  const int n = 200, d = 400, p = 600;
  const double lambda = 0.01, sigma2 = 0.0025;
  const auto teacher = make_teacher(d, 0.1, 1);
  const auto data = sample_dataset(teacher, n, 2);
  const auto model = init_features(d, p, 3, Activation::centered_quadratic());
  const Eigen::MatrixXd B = design_matrix(model, data.X).B;
  const GaussianPrior prior{lambda, sigma2, p};
  const auto post = posterior(B, data.Y, prior);
  const double finite = kl_posterior_prior(post, prior) / n;
  const double limit = kl_asymptotic(lambda, sigma2, 3.0, post.mean().squaredNorm());
  CHECK(std::abs(finite - limit) / finite < 0.03);
}

TEST_CASE("Stieltjes transform reduces to MP when xi = 0") {
  // psi = d/p, phi = d/n; r = p/n = phi/psi.
  for (double r : {0.5, 2.0}) {
    const StieltjesParams params{1.0, r, 1.0, 0.0};
    const MPLaw law(r);
    for (int k = 1; k < 20; ++k) {
      const double x = law.a + (law.b - law.a) * k / 20.0;
      CHECK(stieltjes_density(x, params) == doctest::Approx(mp_density(x, r)).epsilon(1e-3).scale(1.0));
    }
  }
}

TEST_CASE("Stieltjes transform decays like 1/z") {
  const StieltjesParams params{2.0, 1.0, 1.0, 0.3};
  for (double mag : {1e2, 1e3}) {
    const std::complex<double> z(mag, 1.0);
    const auto res = stieltjes_general(z, params);
    CHECK(std::abs(res.G - 1.0 / z) < 10.0 / (mag * mag));
  }
}

TEST_CASE("ReLU-moment spectrum integrates to one") {
  const auto m = Activation::relu().standardized().moments();
  // Centered ReLU: eta = E f^2, xi = (E f')^2.
  const StieltjesParams params{2.0, 1.0, m.second, m.xi()};
  double total = 0.0;
  const double h = 0.002;
  for (double x = h / 2; x < 8.0; x += h) total += stieltjes_density(x, params, 1e-6) * h;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("shape ratio") {
  const auto s = ShapeRatio::from_sizes(600, 200, 400);
  CHECK(s.r == 3.0);
  CHECK(*s.r1 == 1.5);
  CHECK(*s.r2 == 0.5);
  CHECK_THROWS_AS((ShapeRatio{0.0, {}, {}}.validate()), ValidationError);
  const auto p = StieltjesParams::from_sizes(400, 600, 200, 1.0, 0.0);
  CHECK(p.psi == doctest::Approx(400.0 / 600.0));
  CHECK(p.phi == 2.0);
}
