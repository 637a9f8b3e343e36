#include "gibbsic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "gibbsic/csv_io.hpp"
#include "gibbsic/error.hpp"
#include "gibbsic/log.hpp"
#include "gibbsic/rmt.hpp"
#include "gibbsic/svg_plot.hpp"

namespace gibbsic {

namespace {

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

double half_log_2pi(double s2) { return 0.5 * std::log(2.0 * std::numbers::pi * s2); }

}  // namespace

IdentityCheck marginal_identity_check(int instances, std::uint64_t seed) {
  detail::require(instances >= 1, "marginal_identity_check: instances must be positive");
  IdentityCheck out;
  out.instances = instances;
  for (int k = 0; k < instances; ++k) {
    Rng rng(derive_seed(seed, {tag_hash("identity"), static_cast<std::uint64_t>(k)}));
    const int n = 10 + static_cast<int>(rng.uniform() * 91.0);
    const int p = 1 + static_cast<int>(rng.uniform() * 50.0);
    const double lambda = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
    const double sigma2 = std::pow(10.0, -2.0 + 2.0 * rng.uniform());
    const Eigen::MatrixXd B = rng.normal_matrix(n, p);
    const Eigen::VectorXd w = rng.normal_vector(p) / std::sqrt(static_cast<double>(p));
    const Eigen::VectorXd Y = B * w + std::sqrt(sigma2) * rng.normal_vector(n);
    const GaussianPrior prior{lambda, sigma2, p};
    const GibbsPosterior post = posterior(B, Y, prior);
    const double plus = bic_plus_exact(post.expected_logloss(), kl_posterior_prior(post, prior), n);
    const double minus = bic_minus_exact(prior_expected_risk(B, Y, prior), kl_prior_posterior(post, prior), n);
    const double marginal = -log_marginal_exact(B, Y, prior) / n;
    out.max_plus_minus = std::max(out.max_plus_minus, std::abs(plus - minus));
    out.max_plus_marginal = std::max(out.max_plus_marginal, std::abs(plus - marginal));
    out.max_minus_marginal = std::max(out.max_minus_marginal, std::abs(minus - marginal));
  }
  return out;
}

TransformCheck rmt_transform_check(int grid) {
  detail::require(grid >= 1, "rmt_transform_check: grid must be positive");
  TransformCheck out;
  for (double gamma : logspace(1e-2, 1e2, grid)) {
    for (double r : logspace(1e-1, 1e1, grid)) {
      TransformRow row;
      row.gamma = gamma;
      row.r = r;
      row.F = rmt::f_func(gamma, r);
      row.eta = rmt::eta_transform(gamma, r);
      row.shannon = rmt::shannon_transform(gamma, r);
      row.V = rmt::v_func(gamma, r);
      row.eta_quadrature = rmt::eta_transform_quadrature(gamma, r);
      row.shannon_quadrature = rmt::shannon_transform_quadrature(gamma, r);
      out.max_eta_error = std::max(out.max_eta_error, std::abs(row.eta - row.eta_quadrature));
      out.max_shannon_error = std::max(out.max_shannon_error, std::abs(row.shannon - row.shannon_quadrature));
      out.max_identity_error = std::max(out.max_identity_error, std::abs(row.V - r * row.shannon));
      out.rows.push_back(row);
    }
  }
  return out;
}

void write_transform_csv(const std::vector<TransformRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "gamma,r,F,eta,shannon,V,eta_quadrature,shannon_quadrature\n";
  for (const auto& r : rows)
    out << format_double(r.gamma) << ',' << format_double(r.r) << ',' << format_double(r.F) << ','
        << format_double(r.eta) << ',' << format_double(r.shannon) << ',' << format_double(r.V) << ','
        << format_double(r.eta_quadrature) << ',' << format_double(r.shannon_quadrature) << '\n';
}

std::vector<CovarianceRow> covariance_check(const std::vector<std::string>& activations,
                                            const std::vector<double>& lambdas, const std::vector<double>& ratios,
                                            int n, int d, int seeds, std::uint64_t base_seed) {
  detail::require(n > 0 && d > 0 && seeds >= 1, "covariance_check: sizes must be positive");
  std::vector<CovarianceRow> rows;
  for (const auto& name : activations) {
    const Activation act = Activation::from_name(name);
    for (double r : ratios) {
      const int p = std::max(1, static_cast<int>(std::lround(r * n)));
      std::vector<Eigen::VectorXd> spectra;
      for (int s = 0; s < seeds; ++s) {
        const auto su = static_cast<std::uint64_t>(s);
        Rng xr(derive_seed(base_seed, {tag_hash("cov-x"), su}));
        const Eigen::MatrixXd X = xr.normal_matrix(n, d);
        const RFModel model = init_features(d, p, derive_seed(base_seed, {tag_hash("cov-f"), su}), act);
        spectra.push_back(gram_spectrum(design_matrix(model, X).B));
      }
      for (double lambda : lambdas) {
        std::vector<double> vals;
        for (const auto& mu : spectra) vals.push_back(rmt::covariance_term_from_spectrum(mu, lambda, n));
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        CovarianceRow row;
        row.activation = name;
        row.lambda = lambda;
        row.r = r;
        row.p = p;
        row.finite_mean = mean;
        row.finite_sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
        row.asymptotic = rmt::covariance_term_asymptotic(lambda, static_cast<double>(p) / n);
        row.rel_error = std::abs(mean - row.asymptotic) / std::abs(row.asymptotic);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_covariance_csv(const std::vector<CovarianceRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "activation,lambda,r,p,finite_mean,finite_sd,asymptotic,rel_error\n";
  for (const auto& r : rows)
    out << r.activation << ',' << format_double(r.lambda) << ',' << format_double(r.r) << ',' << r.p << ','
        << format_double(r.finite_mean) << ',' << format_double(r.finite_sd) << ',' << format_double(r.asymptotic)
        << ',' << format_double(r.rel_error) << '\n';
}

std::vector<double> trajectory_mse(const SamplerRun& run, double sigma2) {
  std::vector<double> out;
  for (const auto& pt : run.trajectory) out.push_back(2.0 * sigma2 * (pt.loss - half_log_2pi(sigma2)));
  return out;
}

namespace {

double whitened_chi2(const SamplerRun& run, const Eigen::MatrixXd& Q, const Eigen::VectorXd& scale,
                     const Eigen::VectorXd& center, int batches, bool use_batch_means) {
  SamplerRun white;
  white.samples.reserve(run.samples.size());
  for (const auto& w : run.samples) white.samples.push_back(scale.cwiseProduct(Q.transpose() * (w - center)));
  const Eigen::VectorXd mean = posterior_mean(white);
  if (!use_batch_means) {
    const Eigen::VectorXd se = posterior_mean_std_error_ar1(white);
    return mean.cwiseQuotient(se).squaredNorm();
  }
  const Eigen::VectorXd se = posterior_mean_std_error(white, batches);
  const boost::math::students_t tdist(batches - 1);
  const boost::math::normal normal;
  double chi2 = 0.0;
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double t = se[i] > 0.0 ? std::abs(mean[i]) / se[i] : 0.0;
    // Two-sided t tail mapped to the normal score with the same tail mass.
    const double tail = std::max(boost::math::cdf(boost::math::complement(tdist, t)), 1e-300);
    const double z = boost::math::quantile(boost::math::complement(normal, tail));
    chi2 += z * z;
  }
  return chi2;
}

}  // namespace

SamplerFidelity sampler_fidelity(const SamplerBenchConfig& cfg) {
  const TeacherModel teacher = make_teacher(cfg.d, cfg.noise_var, derive_seed(cfg.seed, {tag_hash("teacher")}));
  const Dataset data = sample_dataset(teacher, cfg.n, derive_seed(cfg.seed, {tag_hash("train")}));
  const RFModel model =
      init_features(cfg.d, cfg.p, derive_seed(cfg.seed, {tag_hash("features")}), Activation::from_name(cfg.activation));
  const Eigen::MatrixXd B = design_matrix(model, data.X).B;
  const GaussianPrior prior{cfg.lambda, cfg.sigma2, cfg.p};
  const GibbsPosterior post = posterior(B, data.Y, prior);
  const LossSpec loss = rf_loss_spec(B, data.Y, prior);

  SamplerSettings s;
  s.steps = cfg.steps;
  s.burn_in = cfg.burn_in;
  s.thinning = cfg.thinning;
  s.trajectory_every = cfg.trajectory_every;
  const Eigen::VectorXd init = Eigen::VectorXd::Zero(cfg.p);

  SamplerFidelity out;
  s.eta = cfg.eta_mala;
  s.seed = derive_seed(cfg.seed, {tag_hash("mala")});
  out.mala = mala_run(loss, init, s);
  s.eta = cfg.eta_sgld;
  s.seed = derive_seed(cfg.seed, {tag_hash("sgld")});
  out.sgld = sgld_run(loss, init, s);
  out.mala_acceptance = out.mala.acceptance_rate;

  // Eigenbasis of A = lambda n I + B^T B; the posterior precision is A / sigma2.
  Eigen::MatrixXd A = B.transpose() * B;
  A.diagonal().array() += cfg.lambda * cfg.n;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("sampler_fidelity: eigen-solve failed");
  const Eigen::VectorXd scale = (es.eigenvalues().array() / cfg.sigma2).sqrt();

  out.dof = cfg.p;
  out.threshold = boost::math::quantile(boost::math::chi_squared(cfg.p), 0.99);
  out.chi2_mala = whitened_chi2(out.mala, es.eigenvectors(), scale, post.mean(), cfg.batches, cfg.use_batch_means);
  out.chi2_sgld = whitened_chi2(out.sgld, es.eigenvectors(), scale, post.mean(), cfg.batches, cfg.use_batch_means);

  const double c = half_log_2pi(cfg.sigma2);
  out.mse_exact = 2.0 * cfg.sigma2 * (post.expected_logloss() - c);
  out.mse_mala = 2.0 * cfg.sigma2 * (posterior_estimate(out.mala, ScalarStatistic::EmpiricalLoss).value - c);
  out.mse_sgld = 2.0 * cfg.sigma2 * (posterior_estimate(out.sgld, ScalarStatistic::EmpiricalLoss).value - c);
  out.mse_rel_diff = std::abs(out.mse_mala - out.mse_sgld) / std::abs(out.mse_mala);
  out.norm2_mala = posterior_estimate(out.mala, ScalarStatistic::Norm2).value;
  out.norm2_sgld = posterior_estimate(out.sgld, ScalarStatistic::Norm2).value;
  return out;
}

ISklConsistency iskl_consistency(int n, int p, int d, int replicates, const SamplerSettings& mala,
                                 std::uint64_t seed) {
  const double noise = 0.1;
  const TeacherModel teacher = make_teacher(d, noise, derive_seed(seed, {tag_hash("teacher")}));
  const RFModel model =
      init_features(d, p, derive_seed(seed, {tag_hash("features")}), Activation::from_name("relu_std"));
  const ReplicateGenerator gen = rf_replicates(teacher, model, n, 2000, derive_seed(seed, {tag_hash("replicates")}));
  const GaussianPrior prior{0.01, noise, p};

  ISklOptions opts;
  opts.replicates = replicates;
  opts.method = ISklMethod::ClosedForm;
  ISklConsistency out;
  out.closed_form = i_skl_estimate(gen, prior, opts);
  opts.method = ISklMethod::Mala;
  opts.sampler = mala;
  out.mala = i_skl_estimate(gen, prior, opts);
  out.combined_se = std::hypot(out.closed_form.std_error, out.mala.std_error);
  out.z = std::abs(out.closed_form.i_skl - out.mala.i_skl) / out.combined_se;
  return out;
}

std::vector<ISklTrendRow> iskl_classical_trend(int p, const std::vector<int>& ns, int replicates, double lambda,
                                               std::uint64_t seed) {
  detail::require(p >= 1 && replicates >= 2 && lambda > 0.0, "iskl_classical_trend: bad arguments");
  const double noise = 1.0;
  const double s2 = noise;
  Rng trng(derive_seed(seed, {tag_hash("teacher")}));
  Eigen::VectorXd w_star = trng.normal_vector(p);
  w_star /= w_star.norm();

  std::vector<ISklTrendRow> rows;
  for (int n : ns) {
    detail::require(n > p + 1, "iskl_classical_trend: needs n > p + 1");
    const double nd = n;
    std::vector<double> gaps;
    for (int k = 0; k < replicates; ++k) {
      Rng rng(derive_seed(seed, {tag_hash("design"), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)}));
      const Eigen::MatrixXd X = rng.normal_matrix(n, p);
      Eigen::MatrixXd G = X.transpose() * X;
      Eigen::MatrixXd A = G;
      A.diagonal().array() += lambda * nd;
      const Eigen::LLT<Eigen::MatrixXd> llt(A);
      const Eigen::MatrixXd AinvG = llt.solve(G);
      const Eigen::VectorXd v = llt.solve(w_star);
      const double tr_ainv = llt.solve(Eigen::MatrixXd::Identity(p, p)).trace();
      const double tr_h = AinvG.trace();
      const double tr_h2 = (AinvG * AinvG).trace();
      const double tr_ainv_g_ainv = llt.solve(AinvG.transpose()).trace();
      const double bias_w = lambda * lambda * nd * nd * v.squaredNorm();
      const double bias_fit = lambda * lambda * nd * nd * v.dot(G * v);
      // Label noise integrated out given X; the posterior spread adds sigma2 A^{-1} terms.
      const double lp = (noise * tr_ainv_g_ainv + bias_w + s2 * tr_ainv + noise) / (2.0 * s2);
      const double le = (noise * (nd - 2.0 * tr_h + tr_h2) + bias_fit + s2 * tr_h) / (2.0 * s2 * nd);
      gaps.push_back(lp - le);
    }
    const ScalarEstimate est = batch_means(gaps, 0);
    ISklTrendRow row;
    row.n = n;
    row.p = p;
    row.gen = est.value;
    row.std_error = est.std_error;
    row.p_over_n = static_cast<double>(p) / nd;
    row.abs_deviation = std::abs(row.gen - row.p_over_n);
    rows.push_back(row);
  }
  return rows;
}

// Presets ---------------------------------------------------------------------

namespace {

Preset sweep_preset(std::string id, std::string description, SweepConfig cfg, std::vector<std::string> figures) {
  cfg.name = id;
  return {std::move(id), std::move(description), true, std::move(cfg), std::move(figures)};
}

Preset table_preset(std::string id, std::string description) {
  return {std::move(id), std::move(description), false, SweepConfig{}, {}};
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  const SweepConfig over = SweepConfig::overparam_defaults();
  SweepConfig lambdas = over;
  lambdas.lambdas = {1e-2, 1e-3, 1e-4};
  SweepConfig small_lambda = over;
  small_lambda.lambdas = {1e-4};

  out.push_back(sweep_preset("fig1-left", "over-parameterized train/test MSE (double descent)", over, {"loss_curves"}));
  out.push_back(sweep_preset("fig1-right", "over-parameterized criteria against classical ones", over,
                             {"criteria_comparison"}));
  out.push_back(sweep_preset("fig2-left", "BIC variants at lambda = 0.001", over, {"criteria_comparison"}));
  out.push_back(sweep_preset("fig2-lambda", "BIC+ and population risk for several lambda", lambdas,
                             {"criteria_comparison", "loss_curves"}));
  out.push_back(sweep_preset("fig3", "KL term of BIC+ against the I_SKL term of AIC+ for several lambda", lambdas,
                             {"kl_vs_iskl"}));
  out.push_back(sweep_preset("fig4-left", "BIC+ decomposition at lambda = 0.001", over, {"bic_decomposition"}));
  out.push_back(sweep_preset("fig4-right", "BIC+ decomposition at lambda = 0.0001", small_lambda,
                             {"bic_decomposition"}));
  SweepConfig quad = over;
  quad.activation = "centered_quadratic";
  quad.lambdas = {1e-2};
  out.push_back(sweep_preset("rmt-covariance", "finite vs asymptotic covariance term along a sweep", quad,
                             {"rmt_covariance"}));
  out.push_back(table_preset("fig6", "finite vs asymptotic covariance term for three activations"));
  out.push_back(table_preset("fig7", "MALA and SGLD training MSE, n = 200"));
  out.push_back(table_preset("fig8", "MALA and SGLD training MSE, n = 800"));
  const SweepConfig classic = SweepConfig::classic_defaults();
  out.push_back(sweep_preset("classic", "classical regime model selection (n = 600)", classic,
                             {"loss_curves", "criteria_comparison"}));
  out.push_back(sweep_preset("fig9", "classical regime model selection (n = 600)", classic,
                             {"loss_curves", "criteria_comparison"}));
  out.push_back(table_preset("prop2-identity", "BIC+ = BIC- = -log m / n on random instances"));
  out.push_back(table_preset("rmt-transforms", "closed-form MP transforms against quadrature"));
  out.push_back(table_preset("iskl-consistency", "closed-form vs MALA I_SKL estimates"));
  out.push_back(table_preset("iskl-trend", "I_SKL / beta against p / n as n grows"));
  return out;
}

std::vector<std::filesystem::path> run_table_preset(const Preset& preset, const ReproduceOptions& opts) {
  const auto& dir = opts.out_dir;
  std::vector<std::filesystem::path> files;
  const std::string& id = preset.id;
  if (id == "fig6") {
    const std::vector<std::string> acts = {"centered_quadratic", "relu_std", "sigmoid_std"};
    const std::vector<double> lambdas = {0.1, 0.01};
    const std::vector<double> ratios = {0.5, 1.0, 2.0, 3.0, 5.0};
    const int seeds = opts.seeds > 0 ? opts.seeds : 10;
    const auto rows = covariance_check(acts, lambdas, ratios, 200, 400, seeds, opts.seed);
    const auto csv = dir / "fig6.csv";
    write_covariance_csv(rows, csv);
    files.push_back(csv);
    for (const auto& act : acts) {
      SvgPlot plot("Covariance term, " + act, "r = p/n", "value");
      for (double lambda : lambdas) {
        PlotSeries fin{"finite n, lambda=" + format_double(lambda), {}, {}, {}};
        PlotSeries asy{"asymptotic, lambda=" + format_double(lambda), {}, {}, {}};
        for (const auto& r : rows) {
          if (r.activation != act || r.lambda != lambda) continue;
          fin.x.push_back(r.r);
          fin.y.push_back(r.finite_mean);
          fin.err.push_back(r.finite_sd);
          asy.x.push_back(r.r);
          asy.y.push_back(r.asymptotic);
        }
        plot.add_series(fin);
        plot.add_series(asy);
      }
      const auto svg = dir / ("fig6_" + act + ".svg");
      plot.save(svg);
      files.push_back(svg);
    }
  } else if (id == "fig7" || id == "fig8") {
    SamplerBenchConfig cfg;
    cfg.n = id == "fig7" ? 200 : 800;
    cfg.seed = opts.seed;
    if (opts.steps > 0) {
      cfg.steps = opts.steps;
      cfg.burn_in = std::min(cfg.burn_in, opts.steps / 10);
    }
    const SamplerFidelity res = sampler_fidelity(cfg);
    const auto mala_csv = dir / (id + "_mala_trajectory.csv");
    const auto sgld_csv = dir / (id + "_sgld_trajectory.csv");
    write_trajectory_csv(res.mala, mala_csv);
    write_trajectory_csv(res.sgld, sgld_csv);
    const auto summary = dir / (id + "_summary.csv");
    {
      auto out = open_out(summary);
      out << "sampler,acceptance,train_mse_plateau,norm2,chi2,chi2_threshold\n";
      out << "mala," << format_double(res.mala_acceptance) << ',' << format_double(res.mse_mala) << ','
          << format_double(res.norm2_mala) << ',' << format_double(res.chi2_mala) << ','
          << format_double(res.threshold) << '\n';
      out << "sgld,1," << format_double(res.mse_sgld) << ',' << format_double(res.norm2_sgld) << ','
          << format_double(res.chi2_sgld) << ',' << format_double(res.threshold) << '\n';
      out << "closed_form,1," << format_double(res.mse_exact) << ",,,\n";
    }
    SvgPlot plot("Training MSE along the chain, n = " + std::to_string(cfg.n), "step", "training MSE");
    auto series = [&](const char* label, const SamplerRun& run) {
      PlotSeries s{label, {}, trajectory_mse(run, cfg.sigma2), {}};
      for (const auto& pt : run.trajectory) s.x.push_back(static_cast<double>(pt.step));
      return s;
    };
    plot.add_series(series("MALA", res.mala));
    plot.add_series(series("SGLD", res.sgld));
    const auto svg = dir / (id + ".svg");
    plot.save(svg);
    files.insert(files.end(), {mala_csv, sgld_csv, summary, svg});
  } else if (id == "prop2-identity") {
    const IdentityCheck c = marginal_identity_check(100, opts.seed);
    const auto csv = dir / "prop2-identity.csv";
    auto out = open_out(csv);
    out << "instances,max_abs_bic_plus_minus,max_abs_bic_plus_marginal,max_abs_bic_minus_marginal\n"
        << c.instances << ',' << format_double(c.max_plus_minus) << ',' << format_double(c.max_plus_marginal) << ','
        << format_double(c.max_minus_marginal) << '\n';
    files.push_back(csv);
  } else if (id == "rmt-transforms") {
    const TransformCheck c = rmt_transform_check(20);
    const auto csv = dir / "rmt-transforms.csv";
    write_transform_csv(c.rows, csv);
    files.push_back(csv);
  } else if (id == "iskl-consistency") {
    SamplerSettings s;
    s.eta = 0.02;
    s.steps = opts.steps > 0 ? opts.steps : 20000;
    s.burn_in = s.steps / 10;
    s.thinning = 10;
    s.seed = derive_seed(opts.seed, {tag_hash("mala")});
    const ISklConsistency c = iskl_consistency(100, 20, 20, 10, s, opts.seed);
    const auto csv = dir / "iskl-consistency.csv";
    auto out = open_out(csv);
    out << "method,i_skl,std_error,replicates\n"
        << "closed_form," << format_double(c.closed_form.i_skl) << ',' << format_double(c.closed_form.std_error)
        << ',' << c.closed_form.replicates << '\n'
        << "mala," << format_double(c.mala.i_skl) << ',' << format_double(c.mala.std_error) << ','
        << c.mala.replicates << '\n';
    files.push_back(csv);
  } else if (id == "iskl-trend") {
    const auto rows = iskl_classical_trend(5, {200, 800, 3200}, 1000, 1e-5, opts.seed);
    const auto csv = dir / "iskl-trend.csv";
    auto out = open_out(csv);
    out << "n,p,gen,std_error,p_over_n,abs_deviation\n";
    for (const auto& r : rows)
      out << r.n << ',' << r.p << ',' << format_double(r.gen) << ',' << format_double(r.std_error) << ','
          << format_double(r.p_over_n) << ',' << format_double(r.abs_deviation) << '\n';
    files.push_back(csv);
  } else {
    throw ValidationError("preset '" + id + "' has no table runner");
  }
  return files;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset& find_preset(std::string_view id) {
  for (const auto& p : presets())
    if (p.id == id) return p;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.id;
  throw ValidationError("unknown figure id '" + std::string(id) + "' (known: " + known + ")");
}

SweepConfig preset_config(const Preset& preset, const ReproduceOptions& opts) {
  SweepConfig cfg = preset.config;
  cfg.seed = opts.seed;
  if (opts.seeds > 0) cfg.seeds = seed_range(opts.seeds);
  for (const auto& o : opts.overrides) cfg.apply_override(o);
  cfg.output_dir = opts.out_dir.string();
  cfg.validate();
  return cfg;
}

std::vector<std::filesystem::path> reproduce(std::string_view id, const ReproduceOptions& opts) {
  const Preset& preset = find_preset(id);
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + opts.out_dir.string() + "': " + ec.message());
  if (!preset.is_sweep) {
    detail::require(opts.overrides.empty(), "preset '" + preset.id + "' takes no config overrides");
    return run_table_preset(preset, opts);
  }
  const SweepConfig cfg = preset_config(preset, opts);
  const SweepResult result = run_sweep(cfg, opts.jobs);
  if (result.rows.empty()) throw NumericalError("every row of preset '" + preset.id + "' failed");
  std::vector<std::filesystem::path> files = write_sweep_outputs(result, opts.out_dir);
  for (const auto& fig : preset.figures) {
    const auto svg = opts.out_dir / (preset.id + "_" + fig + ".svg");
    emit_plot(result, fig, svg);
    files.push_back(svg);
  }
  return files;
}

}  // namespace gibbsic
