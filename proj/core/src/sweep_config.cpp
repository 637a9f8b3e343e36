#include "gibbsic/sweep_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gibbsic/activation.hpp"
#include "gibbsic/error.hpp"
#include "gibbsic/rng.hpp"

namespace gibbsic {

using nlohmann::json;

std::string_view to_string(Regime r) { return r == Regime::Classic ? "classic" : "overparam"; }

std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Exact: return "exact";
    case SamplerKind::Mala: return "mala";
    case SamplerKind::Sgld: return "sgld";
  }
  return "exact";
}

std::string_view to_string(Sigma2Mode m) { return m == Sigma2Mode::Fixed ? "fixed" : "largest_model"; }

Regime parse_regime(std::string_view s) {
  if (s == "classic") return Regime::Classic;
  if (s == "overparam") return Regime::Overparam;
  throw ValidationError("unknown regime '" + std::string(s) + "' (expected classic or overparam)");
}

SamplerKind parse_sampler_kind(std::string_view s) {
  if (s == "exact") return SamplerKind::Exact;
  if (s == "mala") return SamplerKind::Mala;
  if (s == "sgld") return SamplerKind::Sgld;
  throw ValidationError("unknown sampler kind '" + std::string(s) + "' (expected exact, mala or sgld)");
}

std::vector<int> int_range(int start, int stop, int step) {
  detail::require(step > 0, "int_range: step must be positive");
  std::vector<int> out;
  for (int v = start; v <= stop; v += step) out.push_back(v);
  return out;
}

std::vector<std::uint64_t> seed_range(int count) {
  detail::require(count > 0, "seed_range: count must be positive");
  std::vector<std::uint64_t> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  return out;
}

void SweepConfig::validate() const {
  detail::require(!name.empty(), "config: name must be non-empty");
  detail::require(n >= 3, "config: n must be at least 3");
  detail::require(d >= 1, "config: d must be positive");
  detail::require(noise_var > 0.0 && std::isfinite(noise_var), "config: noise_var must be positive");
  if (sigma2_mode == Sigma2Mode::Fixed)
    detail::require(sigma2 > 0.0 && std::isfinite(sigma2), "config: sigma2 must be positive");
  detail::require(!lambdas.empty(), "config: lambdas must be non-empty");
  for (double l : lambdas) detail::require(l > 0.0 && std::isfinite(l), "config: every lambda must be positive");
  detail::require(!p_grid.empty(), "config: p_grid must be non-empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    detail::require(p_grid[i] >= 1, "config: p_grid entries must be positive");
    if (i > 0) detail::require(p_grid[i] > p_grid[i - 1], "config: p_grid must be strictly increasing");
  }
  if (sigma2_mode == Sigma2Mode::LargestModel)
    detail::require(p_grid.back() < n, "config: sigma2 = largest_model needs the largest p below n");
  (void)Activation::from_name(activation);
  detail::require(sampler.eta > 0.0, "config: sampler.eta must be positive");
  detail::require(sampler.steps >= 1, "config: sampler.steps must be positive");
  detail::require(sampler.burn_in >= 0 && sampler.burn_in < sampler.steps,
                  "config: sampler.burn_in must lie in [0, steps)");
  detail::require(sampler.thinning >= 1, "config: sampler.thinning must be positive");
  detail::require(!seeds.empty(), "config: seeds must be non-empty");
  std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
  detail::require(uniq.size() == seeds.size(), "config: seeds must be distinct");
  detail::require(replicates >= 1, "config: replicates must be at least 1");
  detail::require(holdout >= 1, "config: holdout must be positive");
}

namespace {

json to_json_obj(const SweepConfig& c) {
  json j;
  j["name"] = c.name;
  j["regime"] = std::string(to_string(c.regime));
  j["n"] = c.n;
  j["d"] = c.d;
  j["noise_var"] = c.noise_var;
  if (c.sigma2_mode == Sigma2Mode::Fixed)
    j["sigma2"] = c.sigma2;
  else
    j["sigma2"] = "largest_model";
  j["lambdas"] = c.lambdas;
  j["p_grid"] = c.p_grid;
  j["activation"] = c.activation;
  j["sampler"] = {{"kind", std::string(to_string(c.sampler.kind))},
                  {"eta", c.sampler.eta},
                  {"steps", c.sampler.steps},
                  {"burn_in", c.sampler.burn_in},
                  {"thinning", c.sampler.thinning}};
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["replicates"] = c.replicates;
  j["holdout"] = c.holdout;
  j["timing"] = c.timing;
  j["fail_p"] = c.fail_p;
  return j;
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

void from_json_obj(const json& j, SweepConfig& c) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  static const std::set<std::string> known = {"name",   "regime",  "n",         "d",        "noise_var", "sigma2",
                                              "lambdas", "p_grid", "activation", "sampler", "seed",      "seeds",
                                              "replicates", "holdout", "timing", "fail_p", "output_dir"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ValidationError("config: unknown key '" + k + "'");

  if (j.contains("name")) c.name = get_as<std::string>(j["name"], "name");
  if (j.contains("regime")) c.regime = parse_regime(get_as<std::string>(j["regime"], "regime"));
  if (j.contains("n")) c.n = get_as<int>(j["n"], "n");
  if (j.contains("d")) c.d = get_as<int>(j["d"], "d");
  if (j.contains("noise_var")) c.noise_var = get_as<double>(j["noise_var"], "noise_var");
  if (j.contains("sigma2")) {
    const json& s = j["sigma2"];
    if (s.is_string()) {
      if (s.get<std::string>() != "largest_model")
        throw ValidationError("config: sigma2 must be a number or \"largest_model\"");
      c.sigma2_mode = Sigma2Mode::LargestModel;
    } else {
      c.sigma2_mode = Sigma2Mode::Fixed;
      c.sigma2 = get_as<double>(s, "sigma2");
    }
  }
  if (j.contains("lambdas")) {
    const json& l = j["lambdas"];
    c.lambdas = l.is_number() ? std::vector<double>{l.get<double>()} : get_as<std::vector<double>>(l, "lambdas");
  }
  if (j.contains("p_grid")) {
    const json& g = j["p_grid"];
    if (g.is_object()) {
      c.p_grid = int_range(get_as<int>(g.at("start"), "p_grid.start"), get_as<int>(g.at("stop"), "p_grid.stop"),
                           get_as<int>(g.at("step"), "p_grid.step"));
    } else {
      c.p_grid = get_as<std::vector<int>>(g, "p_grid");
    }
  }
  if (j.contains("activation")) c.activation = get_as<std::string>(j["activation"], "activation");
  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    if (!s.is_object()) throw ValidationError("config: sampler must be an object");
    for (const auto& [k, v] : s.items())
      if (k != "kind" && k != "eta" && k != "steps" && k != "burn_in" && k != "thinning")
        throw ValidationError("config: unknown key 'sampler." + k + "'");
    if (s.contains("kind")) c.sampler.kind = parse_sampler_kind(get_as<std::string>(s["kind"], "sampler.kind"));
    if (s.contains("eta")) c.sampler.eta = get_as<double>(s["eta"], "sampler.eta");
    if (s.contains("steps")) c.sampler.steps = get_as<long>(s["steps"], "sampler.steps");
    if (s.contains("burn_in")) c.sampler.burn_in = get_as<long>(s["burn_in"], "sampler.burn_in");
    if (s.contains("thinning")) c.sampler.thinning = get_as<long>(s["thinning"], "sampler.thinning");
  }
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    c.seeds = s.is_number_integer() ? seed_range(s.get<int>()) : get_as<std::vector<std::uint64_t>>(s, "seeds");
  }
  if (j.contains("replicates")) c.replicates = get_as<int>(j["replicates"], "replicates");
  if (j.contains("holdout")) c.holdout = get_as<int>(j["holdout"], "holdout");
  if (j.contains("timing")) c.timing = get_as<bool>(j["timing"], "timing");
  if (j.contains("fail_p")) c.fail_p = get_as<std::vector<int>>(j["fail_p"], "fail_p");
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
}

}  // namespace

std::string SweepConfig::to_json() const { return to_json_obj(*this).dump(2); }

SweepConfig SweepConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: parse error: ") + e.what());
  }
  SweepConfig c;
  from_json_obj(j, c);
  return c;
}

SweepConfig SweepConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  // Sweep outputs wrap the config as {"config_hash": ..., "config": {...}}.
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path.string() + "': " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("config_hash")) return from_json(j["config"].dump());
  return from_json(ss.str());
}

void SweepConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  detail::require(eq != std::string_view::npos && eq > 0, "override must look like key=value: '" +
                                                              std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json j = to_json_obj(*this);
  if (!output_dir.empty()) j["output_dir"] = output_dir;
  json* target = &j;
  std::string_view rest = key;
  for (;;) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (dot == std::string_view::npos) {
      (*target)[part] = value;
      break;
    }
    target = &(*target)[part];
    rest = rest.substr(dot + 1);
  }
  SweepConfig updated;
  from_json_obj(j, updated);
  *this = updated;
}

std::uint64_t SweepConfig::hash() const { return tag_hash(to_json_obj(*this).dump()); }

SweepConfig SweepConfig::overparam_defaults() {
  SweepConfig c;
  c.name = "overparam";
  c.regime = Regime::Overparam;
  c.n = 200;
  c.d = 400;
  c.noise_var = 0.1;
  c.sigma2_mode = Sigma2Mode::Fixed;
  c.sigma2 = 0.05 * 0.05;
  c.lambdas = {1e-3};
  c.p_grid = int_range(40, 1000, 40);
  c.activation = "relu";
  c.sampler = {SamplerKind::Exact, 1e-3, 20, 0, 1};
  c.seeds = seed_range(50);
  c.replicates = 2;
  c.holdout = 1000;
  return c;
}

SweepConfig SweepConfig::classic_defaults() {
  SweepConfig c;
  c.name = "classic";
  c.regime = Regime::Classic;
  c.n = 600;
  c.d = 80;
  c.noise_var = 0.2;
  c.sigma2_mode = Sigma2Mode::LargestModel;
  c.lambdas = {1e-3};
  c.p_grid = int_range(30, 120, 10);
  c.activation = "relu";
  c.sampler = {SamplerKind::Exact, 1e-3, 20, 0, 1};
  c.seeds = seed_range(50);
  c.replicates = 1;
  c.holdout = 2000;
  return c;
}

}  // namespace gibbsic
