#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

#include "gibbsic/activation.hpp"
#include "gibbsic/data_gen.hpp"

namespace gibbsic {

/// Random feature model g(x) = f(x^T F / sqrt(d)) w with a frozen d x p matrix F.
///
/// Column j of F is drawn from its own stream keyed by (feature_seed, j), so the
/// models for increasing p on one seed are nested: F(p) is the first p columns of F(p').
struct RFModel {
  Eigen::MatrixXd F;
  Activation activation = Activation::centered_quadratic();
  int d = 0;
  int p = 0;
  std::uint64_t feature_seed = 0;
};

/// B = f(X F / sqrt(d)), n x p.
struct DesignMatrix {
  Eigen::MatrixXd B;
  Eigen::Index n() const { return B.rows(); }
  Eigen::Index p() const { return B.cols(); }
};

RFModel init_features(int d, int p, std::uint64_t feature_seed);
RFModel init_features(int d, int p, std::uint64_t feature_seed, Activation activation);

DesignMatrix design_matrix(const RFModel& model, const Eigen::MatrixXd& X);

/// Per-sample Gaussian log-loss without any prior term:
/// (1/n) [ ||Y - Bw||^2 / (2 sigma2) + (n/2) log(2 pi sigma2) ].
double empirical_logloss(const Eigen::VectorXd& w, const Eigen::MatrixXd& B,
                         const Eigen::VectorXd& Y, double sigma2);

/// (1/n) ||Y - Bw||^2.
double empirical_mse(const Eigen::VectorXd& w, const Eigen::MatrixXd& B, const Eigen::VectorXd& Y);

/// Monte-Carlo population risk with standard errors.
struct PopulationRisk {
  double mse = 0.0;
  double mse_se = 0.0;
  double logloss = 0.0;
  double logloss_se = 0.0;
  int samples = 0;
};

/// Estimates E[(y - g(x))^2] and the matching log-loss over m fresh draws from
/// the teacher. Draws are streamed in chunks; values depend only on (m, seed).
PopulationRisk population_risk_mc(const Eigen::VectorXd& w, const RFModel& model,
                                  const TeacherModel& teacher, int m, std::uint64_t seed,
                                  double sigma2);

void write_matrix_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path);

}  // namespace gibbsic
