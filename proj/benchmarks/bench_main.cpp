#include <benchmark/benchmark.h>

#include "gibbsic/criteria.hpp"
#include "gibbsic/data_gen.hpp"
#include "gibbsic/gibbs.hpp"
#include "gibbsic/rf_model.hpp"
#include "gibbsic/rmt.hpp"
#include "gibbsic/samplers.hpp"
#include "gibbsic/sweep.hpp"

using namespace gibbsic;

namespace {

struct Problem {
  Eigen::MatrixXd B;
  Eigen::VectorXd Y;
  GaussianPrior prior;
};

Problem make_problem(int n, int p, int d = 400) {
  const TeacherModel t = make_teacher(d, 0.1, 1);
  const Dataset data = sample_dataset(t, n, 2);
  const RFModel m = init_features(d, p, 3, Activation::relu());
  return {design_matrix(m, data.X).B, data.Y, GaussianPrior{1e-3, 0.0025, p}};
}

}  // namespace

static void BM_DesignMatrix(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const TeacherModel t = make_teacher(400, 0.1, 1);
  const Dataset data = sample_dataset(t, 200, 2);
  const RFModel m = init_features(400, p, 3, Activation::relu());
  for (auto _ : state) benchmark::DoNotOptimize(design_matrix(m, data.X).B.data());
}
BENCHMARK(BM_DesignMatrix)->Arg(200)->Arg(1000);

static void BM_Posterior(benchmark::State& state) {
  const Problem pr = make_problem(200, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(posterior(pr.B, pr.Y, pr.prior).mean().data());
}
BENCHMARK(BM_Posterior)->Arg(40)->Arg(200)->Arg(1000);

static void BM_KlTerms(benchmark::State& state) {
  const Problem pr = make_problem(200, 600);
  const GibbsPosterior post = posterior(pr.B, pr.Y, pr.prior);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kl_posterior_prior(post, pr.prior));
    benchmark::DoNotOptimize(kl_prior_posterior(post, pr.prior));
  }
}
BENCHMARK(BM_KlTerms);

static void BM_MalaSteps(benchmark::State& state) {
  const Problem pr = make_problem(200, 600);
  const LossSpec loss = rf_loss_spec(pr.B, pr.Y, pr.prior);
  SamplerSettings s{1e-4, 1000, 0, 100, 5, 0};
  const Eigen::VectorXd init = Eigen::VectorXd::Zero(600);
  for (auto _ : state) benchmark::DoNotOptimize(mala_run(loss, init, s).acceptance_rate);
  state.SetItemsProcessed(state.iterations() * s.steps);
}
BENCHMARK(BM_MalaSteps)->Unit(benchmark::kMillisecond);

static void BM_SgldSteps(benchmark::State& state) {
  const Problem pr = make_problem(200, 600);
  const LossSpec loss = rf_loss_spec(pr.B, pr.Y, pr.prior);
  SamplerSettings s{5e-5, 1000, 0, 100, 5, 0};
  const Eigen::VectorXd init = Eigen::VectorXd::Zero(600);
  for (auto _ : state) benchmark::DoNotOptimize(sgld_run(loss, init, s).samples.size());
  state.SetItemsProcessed(state.iterations() * s.steps);
}
BENCHMARK(BM_SgldSteps)->Unit(benchmark::kMillisecond);

static void BM_MpTransforms(benchmark::State& state) {
  double g = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rmt::eta_transform(g, 2.0) + rmt::shannon_transform(g, 2.0) + rmt::f_func(g, 2.0));
    g = g > 100.0 ? 0.01 : g * 1.1;
  }
}
BENCHMARK(BM_MpTransforms);

static void BM_SweepRow(benchmark::State& state) {
  SweepConfig c = SweepConfig::overparam_defaults();
  c.replicates = 2;
  for (auto _ : state) benchmark::DoNotOptimize(compute_row(c, static_cast<int>(state.range(0)), 0, 1e-3).test_mse);
}
BENCHMARK(BM_SweepRow)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
