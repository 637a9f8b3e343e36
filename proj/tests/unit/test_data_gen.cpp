#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gibbsic/data_gen.hpp"
#include "gibbsic/error.hpp"

using namespace gibbsic;

TEST_CASE("teacher has unit norm") {
  const auto t = make_teacher(400, 0.1, 11);
  CHECK(t.w_star.size() == 400);
  CHECK(t.w_star.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.noise_var == 0.1);
}

TEST_CASE("one-dimensional teacher is +-1") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto t = make_teacher(1, 0.2, s);
    CHECK(std::abs(t.w_star[0]) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("teacher and dataset are deterministic") {
  const auto a = make_teacher(30, 0.5, 9), b = make_teacher(30, 0.5, 9);
  CHECK(a.w_star == b.w_star);
  const auto da = sample_dataset(a, 50, 4), db = sample_dataset(b, 50, 4);
  CHECK(da.X == db.X);
  CHECK(da.Y == db.Y);
  CHECK(da.X.rows() == 50);
  CHECK(da.X.cols() == 30);
}

TEST_CASE("datasets are prefix-nested in n") {
  const auto t = make_teacher(5, 0.1, 1);
  const auto big = sample_dataset(t, 40, 8), small = sample_dataset(t, 10, 8);
  CHECK(big.X.topRows(10) == small.X);
  CHECK(big.Y.head(10) == small.Y);
}

TEST_CASE("vanishing noise gives Y = X w*") {
  const auto t = make_teacher(7, 1e-12, 2);
  const auto d = sample_dataset(t, 5, 3);
  CHECK((d.Y - d.X * t.w_star).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("label mean and variance over 1e5 samples") {
  const double noise = 0.3;
  const auto t = make_teacher(4, noise, 5);
  const int n = 100000;
  const auto d = sample_dataset(t, n, 6);
  const double mean = d.Y.mean();
  CHECK(std::abs(mean) < 3.0 * std::sqrt(1.0 + noise) / std::sqrt(n));
  const double var = (d.Y.array() - mean).square().mean();
  // Var of the sample variance of a Gaussian: 2 s^4 / n.
  const double target = t.w_star.squaredNorm() + noise;
  CHECK(std::abs(var - target) < 3.0 * std::sqrt(2.0 / n) * target);
}

TEST_CASE("holdout uses a disjoint seed namespace") {
  const auto t = make_teacher(3, 0.1, 1);
  const auto train = sample_dataset(t, 4, 77);
  const auto hold = sample_holdout(t, 4, 77);
  CHECK(train.X != hold.X);
  CHECK(hold.X == sample_dataset(t, 4, 77 ^ kTestSeedXor).X);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(make_teacher(0, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(make_teacher(3, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(make_teacher(3, -1.0, 1), ValidationError);
  const auto t = make_teacher(3, 0.1, 1);
  CHECK_THROWS_AS(sample_dataset(t, 0, 1), ValidationError);
}

TEST_CASE("dataset CSV round trip") {
  const auto t = make_teacher(2, 0.1, 1);
  const auto d = sample_dataset(t, 3, 2);
  std::filesystem::create_directories(GIBBSIC_TEST_TMP_DIR);
  const auto path = std::filesystem::path(GIBBSIC_TEST_TMP_DIR) / "data.csv";
  write_dataset_csv(d, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x_0,x_1,y");
  for (int i = 0; i < 3; ++i) {
    std::getline(in, line);
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < 2; ++j) {
      std::getline(ss, cell, ',');
      CHECK(std::strtod(cell.c_str(), nullptr) == d.X(i, j));
    }
    std::getline(ss, cell, ',');
    CHECK(std::strtod(cell.c_str(), nullptr) == d.Y[i]);
  }
}
