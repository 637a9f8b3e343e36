#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbsic/csv_io.hpp"
#include "gibbsic/data_gen.hpp"
#include "gibbsic/error.hpp"
#include "gibbsic/experiments.hpp"
#include "gibbsic/log.hpp"
#include "gibbsic/rf_model.hpp"
#include "gibbsic/rmt.hpp"
#include "gibbsic/svg_plot.hpp"
#include "gibbsic/sweep.hpp"

namespace gibbsic {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int jobs = 1;
  bool verbose = false;
};

fs::path resolve_out(const Globals& g, const std::string& from_config = {}) {
  if (!g.out.empty()) return g.out;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

// gen-data ----------------------------------------------------------------------

struct GenDataArgs {
  int n = 200;
  int d = 400;
  double noise = 0.1;
  int holdout = 0;
  std::string name = "data";
};

void run_gen_data(const Globals& g, const GenDataArgs& a, std::ostream& out) {
  const fs::path dir = resolve_out(g);
  ensure_dir(dir);
  const TeacherModel teacher = make_teacher(a.d, a.noise, derive_seed(g.seed, {tag_hash("teacher")}));
  const std::uint64_t train_seed = derive_seed(g.seed, {tag_hash("train")});
  const Dataset train = sample_dataset(teacher, a.n, train_seed);
  const fs::path train_path = dir / (a.name + "_train.csv");
  write_dataset_csv(train, train_path);
  const fs::path teacher_path = dir / (a.name + "_teacher.csv");
  write_matrix_csv(Eigen::MatrixXd(teacher.w_star), teacher_path);
  out << train_path.string() << '\n' << teacher_path.string() << '\n';
  if (a.holdout > 0) {
    const fs::path test_path = dir / (a.name + "_test.csv");
    write_dataset_csv(sample_holdout(teacher, a.holdout, train_seed), test_path);
    out << test_path.string() << '\n';
  }
}

// sweep ---------------------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::string regime = "overparam";
  std::vector<std::string> overrides;
  std::vector<std::string> figures;
};

void run_sweep_cmd(const Globals& g, const SweepArgs& a, std::ostream& out) {
  SweepConfig cfg;
  if (!a.config.empty()) {
    cfg = SweepConfig::load(a.config);
  } else {
    cfg = parse_regime(a.regime) == Regime::Classic ? SweepConfig::classic_defaults()
                                                    : SweepConfig::overparam_defaults();
  }
  for (const auto& o : a.overrides) cfg.apply_override(o);
  if (g.seed_set) cfg.seed = g.seed;
  cfg.validate();
  for (const auto& f : a.figures) {
    const auto& names = figure_names();
    detail::require(std::find(names.begin(), names.end(), f) != names.end(), "unknown figure '" + f + "'");
  }
  const fs::path dir = resolve_out(g, cfg.output_dir);
  ensure_dir(dir);
  const SweepResult result = run_sweep(cfg, g.jobs);
  for (const auto& path : write_sweep_outputs(result, dir)) out << path.string() << '\n';
  if (!result.failures.empty())
    log_warning(std::to_string(result.failures.size()) + " row(s) failed; see " + cfg.name + "_failures.csv");
  if (!result.rows.empty()) {
    for (const auto& f : a.figures) {
      const fs::path svg = dir / (cfg.name + "_" + f + ".svg");
      emit_plot(result, f, svg);
      out << svg.string() << '\n';
    }
  }
}

// rmt -------------------------------------------------------------------------------

struct RmtArgs {
  std::vector<double> gammas;
  std::vector<double> rs;
  std::string file;
};

void run_rmt(const Globals& g, const RmtArgs& a, std::ostream& out) {
  std::vector<TransformRow> rows;
  if (a.gammas.empty() && a.rs.empty()) {
    rows = rmt_transform_check(20).rows;
  } else {
    detail::require(!a.gammas.empty() && !a.rs.empty(), "rmt: give both --gamma and --r, or neither");
    for (double gamma : a.gammas) {
      for (double r : a.rs) {
        TransformRow row;
        row.gamma = gamma;
        row.r = r;
        row.F = rmt::f_func(gamma, r);
        row.eta = rmt::eta_transform(gamma, r);
        row.shannon = rmt::shannon_transform(gamma, r);
        row.V = rmt::v_func(gamma, r);
        rows.push_back(row);
      }
    }
  }
  std::ostringstream csv;
  csv << "gamma,r,F,eta,shannon,V\n";
  for (const auto& r : rows)
    csv << format_double(r.gamma) << ',' << format_double(r.r) << ',' << format_double(r.F) << ','
        << format_double(r.eta) << ',' << format_double(r.shannon) << ',' << format_double(r.V) << '\n';
  if (a.file.empty()) {
    out << csv.str();
    return;
  }
  const fs::path dir = resolve_out(g);
  ensure_dir(dir);
  const fs::path path = dir / a.file;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << csv.str();
  out << path.string() << '\n';
}

// sampler-bench -------------------------------------------------------------------

void run_sampler_bench(const Globals& g, SamplerBenchConfig cfg, const std::string& name, std::ostream& out) {
  cfg.seed = g.seed;
  detail::require(cfg.n > 0 && cfg.p > 0 && cfg.d > 0, "sampler-bench: sizes must be positive");
  detail::require(cfg.batches >= 2, "sampler-bench: --batches must be at least 2");
  const fs::path dir = resolve_out(g);
  ensure_dir(dir);
  const SamplerFidelity res = sampler_fidelity(cfg);
  write_trajectory_csv(res.mala, dir / (name + "_mala_trajectory.csv"));
  write_trajectory_csv(res.sgld, dir / (name + "_sgld_trajectory.csv"));
  out << "sampler,acceptance,train_mse_plateau,norm2,chi2,chi2_threshold\n"
      << "mala," << format_double(res.mala_acceptance) << ',' << format_double(res.mse_mala) << ','
      << format_double(res.norm2_mala) << ',' << format_double(res.chi2_mala) << ',' << format_double(res.threshold)
      << '\n'
      << "sgld,1," << format_double(res.mse_sgld) << ',' << format_double(res.norm2_sgld) << ','
      << format_double(res.chi2_sgld) << ',' << format_double(res.threshold) << '\n'
      << "closed_form,1," << format_double(res.mse_exact) << ",,,\n";
}

// plot ---------------------------------------------------------------------------------

struct PlotArgs {
  std::vector<std::string> csvs;
  std::string config;
  std::vector<std::string> figures;
};

void run_plot(const Globals& g, const PlotArgs& a, std::ostream& out) {
  std::ifstream in(a.config, std::ios::binary);
  if (!in) throw ValidationError("plot: cannot open config '" + a.config + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("plot: config parse error: ") + e.what());
  }
  // Accept both the sweep's <name>_config.json wrapper and a bare config.
  const std::string text = j.contains("config") ? j["config"].dump() : j.dump();
  SweepResult result;
  result.config = SweepConfig::from_json(text);
  result.config_hash = result.config.hash();
  detail::require(a.csvs.size() == result.config.lambdas.size(),
                  "plot: expected one CSV per lambda (" + std::to_string(result.config.lambdas.size()) + "), got " +
                      std::to_string(a.csvs.size()));
  for (std::size_t i = 0; i < a.csvs.size(); ++i) {
    detail::require(fs::exists(a.csvs[i]), "plot: no such file '" + a.csvs[i] + "'");
    for (auto row : read_csv(a.csvs[i])) {
      row.lambda = result.config.lambdas[i];
      row.n = result.config.n;
      result.rows.push_back(row);
    }
  }
  const fs::path dir = resolve_out(g, result.config.output_dir);
  ensure_dir(dir);
  for (const auto& f : a.figures) {
    const fs::path svg = dir / (result.config.name + "_" + f + ".svg");
    emit_plot(result, f, svg);
    out << svg.string() << '\n';
  }
}

// reproduce -------------------------------------------------------------------------

struct ReproduceArgs {
  std::string id;
  int seeds = 0;
  long steps = 0;
  std::vector<std::string> overrides;
  bool list = false;
};

void run_reproduce(const Globals& g, const ReproduceArgs& a, std::ostream& out) {
  if (a.list) {
    for (const auto& p : presets()) out << p.id << '\t' << p.description << '\n';
    return;
  }
  detail::require(!a.id.empty(), "reproduce: missing <figure-id> (use --list)");
  ReproduceOptions opts;
  opts.out_dir = resolve_out(g);
  opts.jobs = g.jobs;
  opts.seed = g.seed;
  opts.seeds = a.seeds;
  opts.steps = a.steps;
  opts.overrides = a.overrides;
  for (const auto& path : reproduce(a.id, opts)) out << path.string() << '\n';
}

}  // namespace

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gibbs-based information criteria for random-feature regression", "gibbsic"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { g.seed = s, g.seed_set = true; }, "base seed for every random stream")
      ->type_name("UINT");
  app.add_option("--out", g.out, std::string("output directory (default: $") + kOutDirEnv + " or ./out)");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose, "log progress to stderr");

  GenDataArgs gd;
  auto* gen = app.add_subcommand("gen-data", "sample a teacher and a training set as CSV");
  gen->add_option("--n", gd.n, "training samples")->capture_default_str();
  gen->add_option("--d", gd.d, "input dimension")->capture_default_str();
  gen->add_option("--noise", gd.noise, "label noise variance")->capture_default_str();
  gen->add_option("--holdout", gd.holdout, "also write a test set of this size")->capture_default_str();
  gen->add_option("--name", gd.name, "file name prefix")->capture_default_str();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "run a p-grid sweep and write CSV");
  sweep->add_option("--config", sw.config, "JSON config file")->check(CLI::ExistingFile);
  sweep->add_option("--regime", sw.regime, "defaults when no config is given: overparam or classic")
      ->capture_default_str();
  sweep->add_option("--set", sw.overrides, "override a config key, e.g. --set sampler.eta=1e-4");
  sweep->add_option("--figure", sw.figures, "also emit this SVG figure");

  RmtArgs rm;
  auto* rmtc = app.add_subcommand("rmt", "print Marchenko-Pastur transforms (gamma, r, F, eta, shannon, V)");
  rmtc->add_option("--gamma", rm.gammas, "gamma values (default: 20-point log grid)");
  rmtc->add_option("--r", rm.rs, "shape ratios p/n (default: 20-point log grid)");
  rmtc->add_option("--file", rm.file, "write to this file under the output directory instead of stdout");

  SamplerBenchConfig sb;
  std::string sb_name = "sampler_bench";
  auto* bench = app.add_subcommand("sampler-bench", "MALA and SGLD against the closed-form posterior");
  bench->add_option("--n", sb.n)->capture_default_str();
  bench->add_option("--p", sb.p)->capture_default_str();
  bench->add_option("--d", sb.d)->capture_default_str();
  bench->add_option("--noise", sb.noise_var)->capture_default_str();
  bench->add_option("--sigma2", sb.sigma2)->capture_default_str();
  bench->add_option("--lambda", sb.lambda)->capture_default_str();
  bench->add_option("--activation", sb.activation)->capture_default_str();
  bench->add_option("--eta-mala", sb.eta_mala)->capture_default_str();
  bench->add_option("--eta-sgld", sb.eta_sgld)->capture_default_str();
  bench->add_option("--steps", sb.steps)->capture_default_str();
  bench->add_option("--burn-in", sb.burn_in)->capture_default_str();
  bench->add_option("--thinning", sb.thinning)->capture_default_str();
  bench->add_option("--batches", sb.batches)->capture_default_str();
  bench->add_flag("--batch-means", sb.use_batch_means, "batch-means standard errors instead of AR(1)");
  bench->add_option("--name", sb_name, "trajectory file prefix")->capture_default_str();

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "render SVG figures from sweep CSVs");
  plot->add_option("--csv", pl.csvs, "sweep CSV, one per lambda in config order")->required();
  plot->add_option("--config", pl.config, "the sweep's _config.json")->required();
  plot->add_option("--figure", pl.figures, "figure name")->required();

  ReproduceArgs rp;
  auto* repro = app.add_subcommand("reproduce", "run a figure preset");
  repro->add_option("figure-id", rp.id, "preset id (see --list)");
  repro->add_option("--seeds", rp.seeds, "number of seeds (default: the preset's)")->check(CLI::PositiveNumber);
  repro->add_option("--steps", rp.steps, "sampler steps for the sampler presets (default: the preset's)")
      ->check(CLI::PositiveNumber);
  repro->add_option("--set", rp.overrides, "override a config key of a sweep preset");
  repro->add_flag("--list", rp.list, "list preset ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (g.verbose) set_log_level(LogLevel::Info);
  try {
    if (*gen) run_gen_data(g, gd, out);
    else if (*sweep) run_sweep_cmd(g, sw, out);
    else if (*rmtc) run_rmt(g, rm, out);
    else if (*bench) run_sampler_bench(g, sb, sb_name, out);
    else if (*plot) run_plot(g, pl, out);
    else if (*repro) run_reproduce(g, rp, out);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace gibbsic
