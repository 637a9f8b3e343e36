#include "gibbsic/rf_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "gibbsic/error.hpp"
#include "gibbsic/rng.hpp"

namespace gibbsic {

RFModel init_features(int d, int p, std::uint64_t feature_seed) {
  return init_features(d, p, feature_seed, Activation::centered_quadratic());
}

RFModel init_features(int d, int p, std::uint64_t feature_seed, Activation activation) {
  detail::require(d >= 1 && p >= 1, "init_features: d and p must be >= 1");
  RFModel model{Eigen::MatrixXd(d, p), std::move(activation), d, p, feature_seed};
  for (int j = 0; j < p; ++j) {
    Rng rng(derive_seed(feature_seed, {static_cast<std::uint64_t>(j)}));
    for (int i = 0; i < d; ++i) model.F(i, j) = rng.normal();
  }
  return model;
}

DesignMatrix design_matrix(const RFModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.d)
    throw ValidationError("design_matrix: X has " + std::to_string(X.cols()) +
                          " columns, model expects d=" + std::to_string(model.d));
  DesignMatrix dm{X * model.F};
  dm.B /= std::sqrt(static_cast<double>(model.d));
  model.activation.apply_inplace(dm.B);
  return dm;
}

namespace {
void check_dims(const Eigen::VectorXd& w, const Eigen::MatrixXd& B, const Eigen::VectorXd& Y,
                const char* who) {
  if (B.cols() != w.size() || B.rows() != Y.size() || Y.size() == 0)
    throw ValidationError(std::string(who) + ": dimension mismatch (B is " +
                          std::to_string(B.rows()) + "x" + std::to_string(B.cols()) + ", w has " +
                          std::to_string(w.size()) + ", Y has " + std::to_string(Y.size()) + ")");
}
}  // namespace

double empirical_logloss(const Eigen::VectorXd& w, const Eigen::MatrixXd& B,
                         const Eigen::VectorXd& Y, double sigma2) {
  check_dims(w, B, Y, "empirical_logloss");
  detail::require(sigma2 > 0.0, "empirical_logloss: sigma2 must be positive");
  const double n = static_cast<double>(Y.size());
  return (Y - B * w).squaredNorm() / (2.0 * sigma2 * n) +
         0.5 * std::log(2.0 * std::numbers::pi * sigma2);
}

double empirical_mse(const Eigen::VectorXd& w, const Eigen::MatrixXd& B, const Eigen::VectorXd& Y) {
  check_dims(w, B, Y, "empirical_mse");
  return (Y - B * w).squaredNorm() / static_cast<double>(Y.size());
}

PopulationRisk population_risk_mc(const Eigen::VectorXd& w, const RFModel& model,
                                  const TeacherModel& teacher, int m, std::uint64_t seed,
                                  double sigma2) {
  detail::require(m >= 1, "population_risk_mc: m must be >= 1");
  detail::require(sigma2 > 0.0, "population_risk_mc: sigma2 must be positive");
  detail::require(w.size() == model.p, "population_risk_mc: weight length must equal p");
  detail::require(teacher.d == model.d, "population_risk_mc: teacher and model disagree on d");

  constexpr int kChunk = 4096;
  Rng rng(seed);
  const double noise_sd = std::sqrt(teacher.noise_var);
  // Welford accumulation of the squared residual.
  double mean = 0.0, m2 = 0.0;
  long count = 0;
  for (int start = 0; start < m; start += kChunk) {
    const int rows = std::min(kChunk, m - start);
    Eigen::MatrixXd X(rows, model.d);
    Eigen::VectorXd Y(rows);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < model.d; ++j) X(i, j) = rng.normal();
      Y[i] = X.row(i).dot(teacher.w_star) + noise_sd * rng.normal();
    }
    const Eigen::VectorXd resid = Y - design_matrix(model, X).B * w;
    for (int i = 0; i < rows; ++i) {
      const double v = resid[i] * resid[i];
      ++count;
      const double delta = v - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (v - mean);
    }
  }
  PopulationRisk out;
  out.samples = m;
  out.mse = mean;
  out.mse_se = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
  out.logloss = mean / (2.0 * sigma2) + 0.5 * std::log(2.0 * std::numbers::pi * sigma2);
  out.logloss_se = out.mse_se / (2.0 * sigma2);
  return out;
}

void write_matrix_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  char buf[32];
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof buf, j + 1 < M.cols() ? "%.17g," : "%.17g\n", M(i, j));
      out << buf;
    }
  }
}

}  // namespace gibbsic
