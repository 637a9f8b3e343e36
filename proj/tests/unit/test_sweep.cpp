#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gibbsic/csv_io.hpp"
#include "gibbsic/error.hpp"
#include "gibbsic/svg_plot.hpp"
#include "gibbsic/sweep.hpp"

using namespace gibbsic;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp_dir(const char* sub) {
  const fs::path dir = fs::path(GIBBSIC_TEST_TMP_DIR) / sub;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small enough to run in well under a second; frozen as tests/data/mini_sweep.csv.
SweepConfig mini_config() {
  SweepConfig c = SweepConfig::overparam_defaults();
  c.name = "mini";
  c.n = 40;
  c.d = 30;
  c.p_grid = {10, 40, 80};
  c.seeds = {0, 1};
  c.replicates = 3;
  c.holdout = 200;
  return c;
}

}  // namespace

TEST_CASE("CSV header and round trip") {
  CHECK(csv_header() ==
        "p,seed,train_mse,test_mse,train_logloss,aic,bic,aic_plus,bic_plus_exact,bic_minus_exact,"
        "bic_plus_over,bic_minus_over,wbic,l2_term,cov_term,kl_post_prior,kl_prior_post,i_skl,gen_err,wallclock_ms");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");

  std::vector<CriterionReport> rows(2);
  rows[0].p = 3;
  rows[0].seed = 7;
  rows[0].aic = 1.0 / 3.0;
  rows[1].p = 9;
  rows[1].wbic = -2.5e-300;
  rows[1].i_skl = 123456789.123456789;
  const std::string text = to_csv(rows);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (auto col : kReportColumns) CHECK(report_field(back[i], col) == report_field(rows[i], col));
  CHECK(to_csv(back) == text);

  CHECK(to_csv({}) == csv_header() + "\n");
  CHECK(parse_csv(csv_header() + "\n").empty());
  CHECK_THROWS_AS(parse_csv("p,seed\n1,2\n"), ValidationError);
  CHECK_THROWS_AS(parse_csv(csv_header() + "\n1,2,3\n"), ValidationError);

  const fs::path dir = tmp_dir("csv");
  write_csv(rows, dir / "r.csv");
  CHECK(slurp(dir / "r.csv") == text);
  CHECK(read_csv(dir / "r.csv").size() == 2);
  CHECK_THROWS(write_csv(rows, dir / "missing" / "r.csv"));
}

TEST_CASE("config JSON and hash") {
  const SweepConfig c = mini_config();
  const SweepConfig back = SweepConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.hash() == c.hash());

  // Reordered keys hash the same.
  auto j = nlohmann::json::parse(c.to_json());
  nlohmann::ordered_json reordered;
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) reordered[*it] = j[*it];
  CHECK(SweepConfig::from_json(reordered.dump()).hash() == c.hash());

  SweepConfig other = c;
  other.output_dir = "/elsewhere";
  CHECK(other.hash() == c.hash());
  other.apply_override("sampler.eta=0.5");
  CHECK(other.sampler.eta == 0.5);
  CHECK(other.hash() != c.hash());
  other.apply_override("activation=relu_std");
  CHECK(other.activation == "relu_std");
  other.apply_override("lambdas=[0.1,0.01]");
  CHECK(other.lambdas.size() == 2);

  CHECK_THROWS_AS(SweepConfig::from_json(R"({"bogus": 1})"), ValidationError);
  CHECK_THROWS_AS(SweepConfig::from_json("{not json"), ValidationError);
  CHECK_THROWS_AS(other.apply_override("nokey"), ValidationError);
  SweepConfig bad = c;
  bad.p_grid.clear();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.lambdas = {-1.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("ranges") {
  CHECK(int_range(10, 30, 10) == std::vector<int>{10, 20, 30});
  CHECK(int_range(10, 35, 10) == std::vector<int>{10, 20, 30});
  CHECK(seed_range(3) == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("a single-row sweep equals direct module calls") {
  SweepConfig c = mini_config();
  c.p_grid = {40};
  c.seeds = {1};
  c.replicates = 1;
  const auto res = run_sweep(c);
  REQUIRE(res.rows.size() == 1);
  const auto& r = res.rows[0];

  const RowSeeds s = row_seeds(c, 40, 1, c.lambdas[0]);
  const TeacherModel teacher = make_teacher(c.d, c.noise_var, s.teacher);
  const Dataset train = sample_dataset(teacher, c.n, s.data);
  const Dataset hold = sample_holdout(teacher, c.holdout, s.data);
  const RFModel model = init_features(c.d, 40, s.features, Activation::from_name(c.activation));
  const Eigen::MatrixXd B = design_matrix(model, train.X).B;
  const Eigen::MatrixXd Bh = design_matrix(model, hold.X).B;
  const GaussianPrior prior{c.lambdas[0], c.sigma2, 40};
  const auto post = posterior(B, train.Y, prior);

  CHECK(r.kl_post_prior == doctest::Approx(kl_posterior_prior(post, prior) / c.n).epsilon(1e-12));
  CHECK(r.kl_prior_post == doctest::Approx(kl_prior_posterior(post, prior) / c.n).epsilon(1e-12));
  CHECK(r.wbic == doctest::Approx(wbic_closed_form(B, train.Y, prior)).epsilon(1e-12));
  const double gap = post.expected_logloss_on(Bh, hold.Y) - post.expected_logloss();
  CHECK(r.i_skl == doctest::Approx(c.n * gap).epsilon(1e-12));
  const auto fit = classical_fit(B, train.Y, c.sigma2);
  CHECK(r.aic == doctest::Approx(aic_classical(fit.loglik, c.n, 40)).epsilon(1e-12));
  // The exact sampler draws from the posterior, so the sampled loss sits near the closed form.
  CHECK(r.train_logloss == doctest::Approx(post.expected_logloss()).epsilon(0.2));
  CHECK(r.wallclock_ms == 0.0);
}

TEST_CASE("golden mini sweep") {
  const auto res = run_sweep(mini_config());
  CHECK(res.failures.empty());
  CHECK(res.rows.size() == 6);
  const std::string text = to_csv(res.rows);
  const fs::path golden = fs::path(GIBBSIC_TEST_DATA_DIR) / "mini_sweep.csv";
  REQUIRE(fs::exists(golden));
  CHECK(text == slurp(golden));
}

TEST_CASE("failures are isolated and output is independent of jobs") {
  SweepConfig c = mini_config();
  c.fail_p = {40};
  const auto one = run_sweep(c, 1);
  const auto three = run_sweep(c, 3);
  CHECK(one.rows.size() == 4);
  REQUIRE(one.failures.size() == 2);
  CHECK(one.failures[0].p == 40);
  CHECK(one.failures[0].message.find("injected") != std::string::npos);
  CHECK(to_csv(one.rows) == to_csv(three.rows));

  const fs::path dir = tmp_dir("fail");
  const auto paths = write_sweep_outputs(one, dir);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].filename() == "mini.csv");
  CHECK(fs::exists(dir / "mini_failures.csv"));
  CHECK(fs::exists(dir / "mini_config.json"));
  CHECK(SweepConfig::load(dir / "mini_config.json").hash() == c.hash());
}

TEST_CASE("several lambdas write one CSV each") {
  SweepConfig c = mini_config();
  c.lambdas = {1e-2, 1e-3};
  c.seeds = {0};
  const auto res = run_sweep(c);
  CHECK(res.rows_for_lambda(1e-2).size() == 3);
  const auto curves = aggregate(res);
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].ps == std::vector<int>{10, 40, 80});
  const fs::path dir = tmp_dir("lambdas");
  const auto paths = write_sweep_outputs(res, dir);
  CHECK(paths.size() == 2);
  CHECK(fs::exists(dir / "mini_failures.csv") == false);
}

TEST_CASE("aggregate averages over seeds") {
  std::vector<CriterionReport> rows(4);
  for (int i = 0; i < 4; ++i) {
    rows[i].p = i < 2 ? 5 : 10;
    rows[i].seed = i % 2;
    rows[i].test_mse = 1.0 + i;
  }
  const Curve c = aggregate(rows);
  CHECK(c.ps == std::vector<int>{5, 10});
  CHECK(c.mean_of("test_mse") == std::vector<double>{1.5, 3.5});
  CHECK(c.sd_of("test_mse")[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(c.index_of_p(10) == 1);
  CHECK(column_index("gen_err") == 18);
  CHECK_THROWS_AS(column_index("nope"), ValidationError);
}

TEST_CASE("figures render for every name") {
  SweepConfig c = mini_config();
  c.seeds = {0};
  const auto res = run_sweep(c);
  const fs::path dir = tmp_dir("figs");
  for (auto name : figure_names()) {
    const fs::path path = dir / (std::string(name) + ".svg");
    emit_plot(res, name, path);
    const std::string svg = slurp(path);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
  }
  CHECK_THROWS_AS(emit_plot(res, "unknown", dir / "x.svg"), ValidationError);
  SweepResult empty;
  empty.config = c;
  CHECK_THROWS_AS(emit_plot(empty, "loss_curves", dir / "e.svg"), ValidationError);
}
