#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gibbsic {

enum class Regime { Classic, Overparam };
enum class SamplerKind { Exact, Mala, Sgld };
/// Noise variance used by the likelihood: a fixed number, or the unbiased residual
/// variance RSS / (n - p_max) of the largest grid model fitted on each seed's data.
enum class Sigma2Mode { Fixed, LargestModel };

std::string_view to_string(Regime r);
std::string_view to_string(SamplerKind k);
std::string_view to_string(Sigma2Mode m);
Regime parse_regime(std::string_view s);
SamplerKind parse_sampler_kind(std::string_view s);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::Exact;
  double eta = 1e-3;
  long steps = 20;
  long burn_in = 0;
  long thinning = 1;
};

/// Everything that determines a sweep's numbers. `output_dir` is excluded from the
/// hash and from the canonical form, since it does not affect results.
struct SweepConfig {
  std::string name = "sweep";
  Regime regime = Regime::Overparam;
  int n = 200;
  int d = 400;
  double noise_var = 0.1;
  Sigma2Mode sigma2_mode = Sigma2Mode::Fixed;
  double sigma2 = 0.0025;
  std::vector<double> lambdas{1e-3};
  std::vector<int> p_grid;
  std::string activation = "relu";
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  int replicates = 50;  ///< datasets per row for the I_SKL estimate (the row's own data counts as one)
  int holdout = 1000;   ///< held-out sample size for test MSE and population log-loss
  bool timing = false;  ///< write measured wall-clock; off keeps CSV bytes reproducible
  std::vector<int> fail_p;  ///< rows at these p throw (failure-isolation testing)
  std::string output_dir;

  /// Throws ValidationError describing the first violated constraint.
  void validate() const;

  /// Canonical JSON (sorted keys, output_dir omitted).
  std::string to_json() const;
  /// Parses JSON; unknown keys are rejected. Missing keys keep their defaults.
  static SweepConfig from_json(std::string_view text);
  static SweepConfig load(const std::filesystem::path& path);

  /// Applies `key=value` with a dotted key ("sampler.eta") and a JSON value
  /// (bare words are taken as strings).
  void apply_override(std::string_view assignment);

  /// FNV-1a of the canonical JSON; stable under key reordering in the source file.
  std::uint64_t hash() const;

  static SweepConfig overparam_defaults();
  static SweepConfig classic_defaults();
};

/// {start, start + step, ..., <= stop}
std::vector<int> int_range(int start, int stop, int step);
/// seeds 0, 1, ..., count - 1
std::vector<std::uint64_t> seed_range(int count);

}  // namespace gibbsic
