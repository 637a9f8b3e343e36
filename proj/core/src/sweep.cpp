#include "gibbsic/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <thread>

#include "gibbsic/csv_io.hpp"
#include "gibbsic/error.hpp"
#include "gibbsic/gibbs.hpp"
#include "gibbsic/log.hpp"
#include "gibbsic/rf_model.hpp"
#include "gibbsic/rmt.hpp"
#include "gibbsic/samplers.hpp"

namespace gibbsic {

std::vector<CriterionReport> SweepResult::rows_for_lambda(double lambda) const {
  std::vector<CriterionReport> out;
  for (const auto& r : rows)
    if (r.lambda == lambda) out.push_back(r);
  return out;
}

std::size_t column_index(std::string_view column) {
  for (std::size_t i = 0; i < kReportColumns.size(); ++i)
    if (kReportColumns[i] == column) return i;
  throw ValidationError("unknown report column '" + std::string(column) + "'");
}

std::vector<double> Curve::mean_of(std::string_view column) const {
  const std::size_t c = column_index(column);
  std::vector<double> out;
  for (const auto& m : mean) out.push_back(m[c]);
  return out;
}

std::vector<double> Curve::sd_of(std::string_view column) const {
  const std::size_t c = column_index(column);
  std::vector<double> out;
  for (const auto& s : sd) out.push_back(s[c]);
  return out;
}

std::size_t Curve::index_of_p(int p) const {
  const auto it = std::find(ps.begin(), ps.end(), p);
  if (it == ps.end()) throw ValidationError("curve has no point at p = " + std::to_string(p));
  return static_cast<std::size_t>(it - ps.begin());
}

Curve aggregate(const std::vector<CriterionReport>& rows, double lambda) {
  Curve c;
  c.lambda = lambda;
  std::vector<int> ps;
  for (const auto& r : rows) ps.push_back(r.p);
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  constexpr std::size_t K = kReportColumns.size();
  for (int p : ps) {
    std::array<double, K> sum{}, sq{};
    int count = 0;
    for (const auto& r : rows) {
      if (r.p != p) continue;
      ++count;
      for (std::size_t k = 0; k < K; ++k) sum[k] += report_field(r, kReportColumns[k]);
    }
    std::array<double, K> mean{}, sd{};
    for (std::size_t k = 0; k < K; ++k) mean[k] = sum[k] / count;
    for (const auto& r : rows) {
      if (r.p != p) continue;
      for (std::size_t k = 0; k < K; ++k) {
        const double dv = report_field(r, kReportColumns[k]) - mean[k];
        sq[k] += dv * dv;
      }
    }
    for (std::size_t k = 0; k < K; ++k) sd[k] = count > 1 ? std::sqrt(sq[k] / (count - 1)) : 0.0;
    c.ps.push_back(p);
    c.count.push_back(count);
    c.mean.push_back(mean);
    c.sd.push_back(sd);
  }
  return c;
}

std::vector<Curve> aggregate(const SweepResult& result) {
  std::vector<Curve> out;
  for (double lambda : result.config.lambdas) out.push_back(aggregate(result.rows_for_lambda(lambda), lambda));
  return out;
}

RowSeeds row_seeds(const SweepConfig& config, int p, std::uint64_t seed, double lambda) {
  const std::uint64_t base = config.seed;
  RowSeeds s{};
  s.teacher = derive_seed(base, {tag_hash("teacher"), seed});
  s.data = derive_seed(base, {tag_hash("train"), seed});
  s.features = derive_seed(base, {tag_hash("features"), seed});
  s.sampler = derive_seed(base, {tag_hash("sampler"), seed, static_cast<std::uint64_t>(p),
                                 std::bit_cast<std::uint64_t>(lambda)});
  s.replicates = derive_seed(base, {tag_hash("replicates"), seed});
  return s;
}

double resolve_sigma2(const SweepConfig& config, std::uint64_t seed) {
  if (config.sigma2_mode == Sigma2Mode::Fixed) return config.sigma2;
  const RowSeeds s = row_seeds(config, config.p_grid.back(), seed, config.lambdas.front());
  const TeacherModel teacher = make_teacher(config.d, config.noise_var, s.teacher);
  const Dataset train = sample_dataset(teacher, config.n, s.data);
  const RFModel big = init_features(config.d, config.p_grid.back(), s.features,
                                    Activation::from_name(config.activation));
  return unbiased_residual_variance(design_matrix(big, train.X).B, train.Y);
}

CriterionReport compute_row(const SweepConfig& config, int p, std::uint64_t seed, double lambda) {
  const auto t0 = std::chrono::steady_clock::now();
  if (std::find(config.fail_p.begin(), config.fail_p.end(), p) != config.fail_p.end())
    throw NumericalError("injected failure at p = " + std::to_string(p));

  const RowSeeds s = row_seeds(config, p, seed, lambda);
  const int n = config.n;
  const TeacherModel teacher = make_teacher(config.d, config.noise_var, s.teacher);
  const Dataset train = sample_dataset(teacher, n, s.data);
  const Dataset hold = sample_holdout(teacher, config.holdout, s.data);
  const RFModel model = init_features(config.d, p, s.features, Activation::from_name(config.activation));
  const Eigen::MatrixXd B = design_matrix(model, train.X).B;
  const Eigen::MatrixXd Bh = design_matrix(model, hold.X).B;
  const double sigma2 = resolve_sigma2(config, seed);

  const GaussianPrior prior{lambda, sigma2, p};
  const GibbsPosterior post = posterior(B, train.Y, prior);
  const LossSpec loss = rf_loss_spec(B, train.Y, prior);

  SamplerSettings settings;
  settings.eta = config.sampler.eta;
  settings.steps = config.sampler.steps;
  settings.burn_in = config.sampler.burn_in;
  settings.thinning = config.sampler.thinning;
  settings.seed = s.sampler;
  const Eigen::VectorXd init = Eigen::VectorXd::Zero(p);
  SamplerRun run;
  switch (config.sampler.kind) {
    case SamplerKind::Exact: run = exact_run(post, &loss, settings); break;
    case SamplerKind::Mala: run = mala_run(loss, init, settings); break;
    case SamplerKind::Sgld: run = sgld_run(loss, init, settings); break;
  }

  CriterionReport r;
  r.p = p;
  r.n = n;
  r.seed = seed;
  r.lambda = lambda;

  const Eigen::VectorXd w_bar = posterior_mean(run);
  r.train_mse = empirical_mse(w_bar, B, train.Y);
  r.test_mse = empirical_mse(w_bar, Bh, hold.Y);
  r.train_logloss = posterior_estimate(run, ScalarStatistic::EmpiricalLoss).value;

  const ClassicalFit fit = classical_fit(B, train.Y, sigma2);
  r.aic = aic_classical(fit.loglik, n, fit.k);
  r.bic = bic_classical(fit.loglik, n, fit.k);

  const double kl_plus = kl_posterior_prior(post, prior);
  const double kl_minus = kl_prior_posterior(post, prior);
  r.kl_post_prior = kl_plus / n;
  r.kl_prior_post = kl_minus / n;
  r.bic_plus_exact = bic_plus_exact(r.train_logloss, kl_plus, n);
  const double prior_risk = prior_expected_risk(B, train.Y, prior);
  r.bic_minus_exact = bic_minus_exact(prior_risk, kl_minus, n);

  const double ratio = static_cast<double>(p) / n;
  const OverDecomposition over = bic_plus_over(r.train_logloss, post.mean().squaredNorm(), lambda, sigma2, ratio);
  r.bic_plus_over = over.value;
  r.l2_term = over.l2_term;
  r.cov_term = over.covariance_term;
  r.bic_minus_over = bic_minus_over(prior_risk, post, ratio);

  if (config.sampler.kind == SamplerKind::Exact) {
    r.wbic = wbic_closed_form(B, train.Y, prior);
  } else {
    SamplerSettings ws = settings;
    ws.seed = derive_seed(s.sampler, {tag_hash("wbic")});
    r.wbic = wbic_sampled(B, train.Y, prior, ws).value;
  }

  // Replicate 0 is the row's own training set; the rest are fresh datasets from the
  // same teacher, evaluated with the same feature matrix.
  std::vector<double> gaps;
  gaps.push_back(post.expected_logloss_on(Bh, hold.Y) - post.expected_logloss());
  if (config.replicates > 1) {
    const ReplicateGenerator gen = rf_replicates(teacher, model, n, config.holdout, s.replicates);
    for (int k = 1; k < config.replicates; ++k) {
      const Replicate rep = gen(k);
      gaps.push_back(gen_gap_closed_form(rep, posterior(rep.B, rep.Y, prior)));
    }
  }
  double gen = 0.0;
  for (double g : gaps) gen += g;
  gen /= static_cast<double>(gaps.size());
  r.gen_err = gen;
  r.i_skl = n * gen;
  r.aic_plus = aic_plus(r.train_logloss, r.i_skl, n);

  if (config.timing)
    r.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!r.all_finite()) throw NumericalError("row produced non-finite values");
  return r;
}

SweepResult run_sweep(const SweepConfig& config, int jobs) {
  config.validate();
  detail::require(jobs >= 1, "run_sweep: jobs must be at least 1");

  struct Task {
    double lambda;
    int p;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double lambda : config.lambdas)
    for (int p : config.p_grid)
      for (std::uint64_t seed : config.seeds) tasks.push_back({lambda, p, seed});

  struct Outcome {
    std::optional<CriterionReport> row;
    std::string error;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      try {
        outcomes[i].row = compute_row(config, t.p, t.seed, t.lambda);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };

  const int threads = std::min<int>(jobs, static_cast<int>(tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.config = config;
  result.config_hash = config.hash();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (outcomes[i].row) {
      result.rows.push_back(*outcomes[i].row);
    } else {
      result.failures.push_back({tasks[i].p, tasks[i].seed, tasks[i].lambda, outcomes[i].error});
      log_warning("row p=" + std::to_string(tasks[i].p) + " seed=" + std::to_string(tasks[i].seed) +
                  " failed: " + outcomes[i].error);
    }
  }
  return result;
}

namespace {
std::string lambda_tag(double lambda) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}
}  // namespace

std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  const std::string& name = result.config.name;
  std::vector<std::filesystem::path> paths;
  const bool several = result.config.lambdas.size() > 1;
  for (double lambda : result.config.lambdas) {
    const auto path = dir / (several ? name + "_lambda_" + lambda_tag(lambda) + ".csv" : name + ".csv");
    write_csv(result.rows_for_lambda(lambda), path);
    paths.push_back(path);
  }
  const auto fail_path = dir / (name + "_failures.csv");
  if (!result.failures.empty()) {
    std::ofstream out(fail_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + fail_path.string() + "' for writing");
    out << "p,seed,lambda,error\n";
    for (const auto& f : result.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << f.p << ',' << f.seed << ',' << format_double(f.lambda) << ',' << msg << '\n';
    }
  } else {
    std::filesystem::remove(fail_path, ec);
  }
  const auto cfg_path = dir / (name + "_config.json");
  std::ofstream cfg(cfg_path, std::ios::binary);
  if (!cfg) throw std::runtime_error("cannot open '" + cfg_path.string() + "' for writing");
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(result.config_hash));
  cfg << "{\"config_hash\": \"" << hash << "\", \"config\": " << result.config.to_json() << "}\n";
  return paths;
}

}  // namespace gibbsic
