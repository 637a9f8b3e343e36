#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

namespace gibbsic {

/// Linear-Gaussian teacher y = <x, w*> + eps, eps ~ N(0, noise_var), with ||w*|| = 1.
struct TeacherModel {
  Eigen::VectorXd w_star;
  int d = 0;
  double noise_var = 0.0;
};

/// n i.i.d. samples from a teacher. X is n x d, stored column-major (Eigen default).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  int n = 0;
  std::uint64_t seed = 0;
};

/// XOR mask that moves holdout draws into a seed namespace disjoint from training draws.
inline constexpr std::uint64_t kTestSeedXor = 0x7e57'da7a'5eed'0001ULL;

/// Draws w* from N(0, I_d) and normalizes it. A zero draw is retried with seed + 1.
/// Throws ValidationError for d < 1 or noise_var <= 0.
TeacherModel make_teacher(int d, double noise_var, std::uint64_t seed);

/// Draws X with N(0, 1) entries and Y = X w* + eps. Samples are drawn one at a
/// time (x_i then eps_i), so the first k rows of a size-n draw equal a size-k draw.
Dataset sample_dataset(const TeacherModel& teacher, int n, std::uint64_t seed);

/// Fresh holdout set of size m for the training seed `train_seed`.
Dataset sample_holdout(const TeacherModel& teacher, int m, std::uint64_t train_seed);

/// Writes `x_0,...,x_{d-1},y` with 17 significant digits.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace gibbsic
