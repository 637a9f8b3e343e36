#include "gibbsic/data_gen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gibbsic/error.hpp"
#include "gibbsic/rng.hpp"

namespace gibbsic {

TeacherModel make_teacher(int d, double noise_var, std::uint64_t seed) {
  detail::require(d >= 1, "make_teacher: d must be >= 1");
  detail::require(noise_var > 0.0 && std::isfinite(noise_var),
                  "make_teacher: noise_var must be positive and finite");
  for (std::uint64_t s = seed;; ++s) {
    Rng rng(s);
    Eigen::VectorXd w = rng.normal_vector(d);
    const double norm = w.norm();
    if (norm > 0.0) return TeacherModel{w / norm, d, noise_var};
  }
}

Dataset sample_dataset(const TeacherModel& teacher, int n, std::uint64_t seed) {
  detail::require(n >= 1, "sample_dataset: n must be >= 1");
  const int d = teacher.d;
  detail::require(teacher.w_star.size() == d, "sample_dataset: teacher w_star has wrong length");
  Rng rng(seed);
  Dataset data{Eigen::MatrixXd(n, d), Eigen::VectorXd(n), n, seed};
  const double noise_sd = std::sqrt(teacher.noise_var);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.X(i, j) = rng.normal();
    data.Y[i] = data.X.row(i).dot(teacher.w_star) + noise_sd * rng.normal();
  }
  return data;
}

Dataset sample_holdout(const TeacherModel& teacher, int m, std::uint64_t train_seed) {
  return sample_dataset(teacher, m, train_seed ^ kTestSeedXor);
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto d = data.X.cols();
  for (Eigen::Index j = 0; j < d; ++j) out << "x_" << j << ',';
  out << "y\n";
  char buf[32];
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", data.X(i, j));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", data.Y[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace gibbsic
