#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gibbsic/error.hpp"
#include "gibbsic/rf_model.hpp"
#include "gibbsic/samplers.hpp"

using namespace gibbsic;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

struct RFTarget {
  Eigen::MatrixXd B;
  Eigen::VectorXd Y;
  GaussianPrior prior;
};

RFTarget small_rf(double sigma2 = 0.5, double lambda = 0.1, int n = 50, int p = 10) {
  const auto teacher = make_teacher(8, 0.2, 1);
  const auto data = sample_dataset(teacher, n, 2);
  const auto model = init_features(8, p, 3, Activation::from_name("relu_std"));
  return {design_matrix(model, data.X).B, data.Y, GaussianPrior{lambda, sigma2, p}};
}

std::vector<double> coordinate(const SamplerRun& run, int j) {
  std::vector<double> xs;
  for (const auto& s : run.samples) xs.push_back(s[j]);
  return xs;
}

}  // namespace

TEST_CASE("SGLD step edge cases") {
  const auto q = quadratic_loss_spec(scalar(0.0), 1.0, 1.0);
  CHECK(sgld_step(scalar(0.7), q, 0.0, scalar(1.3))[0] == 0.7);
  const auto cold = quadratic_loss_spec(scalar(0.0), 1.0, 1e300);
  CHECK(sgld_step(scalar(1.0), cold, 0.1, scalar(0.5))[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_THROWS_AS(sgld_step(scalar(1.0), q, 0.1, Eigen::VectorXd::Zero(2)), ValidationError);
}

TEST_CASE("non-finite gradients are reported") {
  LossSpec bad;
  bad.value_and_gradient = [](const Eigen::VectorXd& w, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Constant(w.size(), std::nan(""));
    return 0.0;
  };
  CHECK_THROWS_AS(sgld_step(scalar(1.0), bad, 0.1, scalar(0.0)), NumericalError);
}

TEST_CASE("MALA acceptance is one for a symmetric move") {
  const Eigen::VectorXd w = scalar(0.3), g = scalar(0.0);
  CHECK(mala_log_acceptance(w, 1.0, g, w, 1.0, g, 0.1, 5.0) == 0.0);
}

TEST_CASE("MALA log acceptance against the explicit density ratio") {
  // Target exp(-beta F), F = w^2 / 2; proposal N(w - eta w, 2 eta / beta).
  const double beta = 3.0, eta = 0.2, w = 0.4, wp = -0.1;
  auto logq = [&](double to, double from) {
    const double mu = from - eta * from, var = 2.0 * eta / beta;
    return -(to - mu) * (to - mu) / (2.0 * var);
  };
  const double ref = -beta * (wp * wp - w * w) / 2.0 + logq(w, wp) - logq(wp, w);
  CHECK(mala_log_acceptance(scalar(w), w * w / 2, scalar(w), scalar(wp), wp * wp / 2, scalar(wp), eta, beta) ==
        doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("SGLD stationary variance matches the discretized OU prediction") {
  const double c = 2.0, beta = 1.0, eta = 0.2;
  const auto q = quadratic_loss_spec(scalar(0.0), c, beta);
  SamplerSettings s{eta, 400000, 1000, 1, 17, 0};
  const auto run = sgld_run(q, scalar(0.0), s);
  double m2 = 0.0;
  for (const auto& x : run.samples) m2 += x[0] * x[0];
  m2 /= static_cast<double>(run.samples.size());
  // w' = (1 - eta c) w + sqrt(2 eta / beta) xi.
  const double predicted = (2.0 * eta / beta) / (1.0 - (1.0 - eta * c) * (1.0 - eta * c));
  CHECK(m2 == doctest::Approx(predicted).epsilon(0.05));
  CHECK(std::abs(predicted - 1.0 / (beta * c)) > 0.1);
}

TEST_CASE("MALA on a scalar standard normal") {
  const auto q = quadratic_loss_spec(scalar(0.0), 1.0, 1.0);
  SamplerSettings s{0.5, 1010000, 10000, 10, 3, 0};
  const auto run = mala_run(q, scalar(2.0), s);
  CHECK(run.samples.size() == 100000);
  const auto est = ar1_mean(coordinate(run, 0));
  CHECK(std::abs(est.value) < 0.02);
  double m2 = 0.0;
  for (const auto& x : run.samples) m2 += x[0] * x[0];
  CHECK(m2 / 100000.0 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(run.acceptance_rate > 0.5);
  CHECK(run.acceptance_rate < 1.0);
}

TEST_CASE("MALA two-state stationary check") {
  // Shifted target N(0.5, 1) coarsened to the sign of w.
  const auto q = quadratic_loss_spec(scalar(0.5), 1.0, 1.0);
  SamplerSettings s{0.8, 1000000, 1000, 1, 5, 0};
  const auto run = mala_run(q, scalar(0.0), s);
  double pos = 0.0;
  for (const auto& x : run.samples) pos += x[0] > 0.0 ? 1.0 : 0.0;
  pos /= static_cast<double>(run.samples.size());
  const double target = boost::math::cdf(boost::math::normal(), 0.5);
  CHECK(std::abs(pos - target) < 0.02);
}

TEST_CASE("SGLD matches the MALA target moments for a small step") {
  const auto q = quadratic_loss_spec(scalar(1.0), 1.0, 4.0);
  SamplerSettings s{0.02, 400000, 2000, 10, 8, 0};
  const auto run = sgld_run(q, scalar(0.0), s);
  const auto est = ar1_mean(coordinate(run, 0));
  CHECK(std::abs(est.value - 1.0) < 4.0 * est.std_error);
  double var = 0.0;
  for (const auto& x : run.samples) var += (x[0] - est.value) * (x[0] - est.value);
  var /= static_cast<double>(run.samples.size());
  CHECK(var == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("SGLD at very large beta is gradient descent") {
  const auto rf = small_rf();
  auto loss = rf_loss_spec(rf.B, rf.Y, rf.prior, 1e12);
  SamplerSettings s{0.01, 200, 0, 1, 4, 0};
  const auto run = sgld_run(loss, Eigen::VectorXd::Zero(10), s);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(10);
  for (int t = 0; t < 200; ++t) w -= 0.01 * loss.gradient(w);
  CHECK((run.samples.back() - w).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("RF loss value and gradient") {
  const auto rf = small_rf();
  const auto loss = rf_loss_spec(rf.B, rf.Y, rf.prior);
  CHECK(loss.beta == 50.0);
  Rng rng(2);
  const Eigen::VectorXd w = rng.normal_vector(10);
  const double n = 50, s2 = rf.prior.sigma2, lam = rf.prior.lambda;
  const double expect = empirical_logloss(w, rf.B, rf.Y, s2) + lam * w.squaredNorm() / (2 * s2) +
                        (10 / (2 * n)) * std::log(2 * std::numbers::pi * s2 / (lam * n));
  CHECK(loss.value(w) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(loss.data_loss(w) == doctest::Approx(empirical_logloss(w, rf.B, rf.Y, s2)).epsilon(1e-13));
  const Eigen::VectorXd g = loss.gradient(w);
  for (int j = 0; j < 10; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(10);
    e[j] = 1e-6;
    CHECK(g[j] == doctest::Approx((loss.value(w + e) - loss.value(w - e)) / 2e-6).epsilon(1e-6));
  }
  // exp(-n F_Z) is the posterior: its gradient vanishes at the posterior mean.
  const auto post = posterior(rf.B, rf.Y, rf.prior);
  CHECK(loss.gradient(post.mean()).norm() < 1e-10);
}

TEST_CASE("MALA on an RF target reproduces closed-form moments") {
  const auto rf = small_rf();
  const auto post = posterior(rf.B, rf.Y, rf.prior);
  const auto loss = rf_loss_spec(rf.B, rf.Y, rf.prior);
  SamplerSettings s{0.02, 200000, 10000, 10, 6, 0};
  const auto run = mala_run(loss, Eigen::VectorXd::Zero(10), s);
  const auto le = posterior_estimate(run, ScalarStatistic::EmpiricalLoss);
  const auto nrm = posterior_estimate(run, ScalarStatistic::Norm2);
  CHECK(std::abs(le.value - post.expected_logloss()) < 3.0 * le.std_error);
  CHECK(std::abs(nrm.value - post.expected_norm2()) < 3.0 * nrm.std_error);
  // Per-coordinate z scores against the closed-form mean.
  const Eigen::VectorXd mean = posterior_mean(run), se = posterior_mean_std_error_ar1(run);
  const double chi2 = (mean - post.mean()).cwiseQuotient(se).squaredNorm();
  CHECK(chi2 < 23.21);  // chi-square(10) 0.99 quantile
}

TEST_CASE("MALA acceptance guard at eta = 0.01") {
  const auto teacher = make_teacher(400, 0.1, 1);
  const auto data = sample_dataset(teacher, 200, 2);
  const auto model = init_features(400, 600, 3, Activation::from_name("relu_std"));
  const auto B = design_matrix(model, data.X).B;
  const auto loss = rf_loss_spec(B, data.Y, GaussianPrior{0.01, 0.1, 600});
  SamplerSettings s{0.01, 2000, 1000, 10, 1, 0};
  const auto run = mala_run(loss, Eigen::VectorXd::Zero(600), s);
  CHECK(run.acceptance_rate > 0.1);
  CHECK(run.acceptance_rate < 0.99);
}

TEST_CASE("bookkeeping, determinism and exact draws") {
  const auto rf = small_rf();
  const auto loss = rf_loss_spec(rf.B, rf.Y, rf.prior);
  SamplerSettings s{0.01, 105, 20, 5, 9, 10};
  const auto a = mala_run(loss, Eigen::VectorXd::Zero(10), s);
  const auto b = mala_run(loss, Eigen::VectorXd::Zero(10), s);
  CHECK(a.samples.size() == static_cast<std::size_t>(SamplerRun::expected_sample_count(105, 20, 5)));
  CHECK(a.samples.size() == 17);
  CHECK(a.sample_losses.size() == 17);
  CHECK(a.trajectory.size() == 10);
  CHECK(a.trajectory.front().step == 10);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
  const auto sg = sgld_run(loss, Eigen::VectorXd::Zero(10), s);
  CHECK(sg.samples.size() == 17);
  CHECK(sg.acceptance_rate == 1.0);

  const auto post = posterior(rf.B, rf.Y, rf.prior);
  const auto ex = exact_run(post, &loss, s);
  CHECK(ex.samples.size() == 17);

  SamplerRun one;
  one.samples.push_back(scalar(4.0));
  CHECK(posterior_mean(one)[0] == 4.0);
  CHECK(final_sample(one)[0] == 4.0);

  CHECK_THROWS_AS((SamplerSettings{0.0, 10, 0, 1, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((SamplerSettings{0.1, 10, 10, 1, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((SamplerSettings{0.1, 10, 0, 0, 0, 0}.validate()), ValidationError);
}

TEST_CASE("exact draws reproduce posterior moments") {
  const auto rf = small_rf();
  const auto post = posterior(rf.B, rf.Y, rf.prior);
  const auto loss = rf_loss_spec(rf.B, rf.Y, rf.prior);
  const auto run = exact_run(post, &loss, SamplerSettings{0.01, 20000, 0, 1, 2, 0});
  const auto le = posterior_estimate(run, ScalarStatistic::EmpiricalLoss);
  CHECK(std::abs(le.value - post.expected_logloss()) < 4.0 * le.std_error);
}

TEST_CASE("standard errors for an AR(1) series") {
  Rng rng(4);
  const double rho = 0.9;
  std::vector<double> xs(200000);
  double x = 0.0;
  for (auto& v : xs) {
    x = rho * x + std::sqrt(1 - rho * rho) * rng.normal();
    v = x;
  }
  const double exact = std::sqrt((1 + rho) / (1 - rho) / xs.size());
  CHECK(ar1_mean(xs).std_error == doctest::Approx(exact).epsilon(0.05));
  CHECK(batch_means(xs, 20).std_error == doctest::Approx(exact).epsilon(0.4));
  const std::vector<double> iid = {1.0, 2.0, 3.0};
  CHECK(batch_means(iid, 20).std_error == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("trajectory CSV") {
  SamplerRun run;
  run.trajectory.push_back({10, 0.5, 1.25, true});
  run.trajectory.push_back({20, 0.25, 1.0, false});
  std::filesystem::create_directories(GIBBSIC_TEST_TMP_DIR);
  const auto path = std::filesystem::path(GIBBSIC_TEST_TMP_DIR) / "traj.csv";
  write_trajectory_csv(run, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "step,loss,weight_norm,accepted\n10,0.5,1.25,1\n20,0.25,1,0\n");
}
