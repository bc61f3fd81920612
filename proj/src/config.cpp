#include "flowregime/config.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "flowregime/errors.hpp"

namespace flowregime {

using nlohmann::json;

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "bocpd") return ModelKind::Bocpd;
  if (name == "mbo") return ModelKind::Mbo;
  if (name == "mboc") return ModelKind::Mboc;
  throw ConfigError("unknown model '" + name + "' (expected bocpd|mbo|mboc)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Bocpd: return "bocpd";
    case ModelKind::Mbo: return "mbo";
    case ModelKind::Mboc: return "mboc";
  }
  return "?";
}

void RunConfig::validate() const {
  if (!(cp_prob > 0.0) || cp_prob > 1.0) throw ConfigError("cp_prob must be in (0,1]");
  if (sigma0_sq <= 0.0 || sigma_sq <= 0.0 || sigma_init_sq <= 0.0 || sigma_sq0 <= 0.0)
    throw ConfigError("variances must be positive");
  if (std::fabs(rho) >= 1.0) throw ConfigError("|rho| must be < 1");
  for (double r : rho_sweep)
    if (std::fabs(r) >= 1.0) throw ConfigError("|rho| must be < 1 in rho sweep");
  if (eta < 1) throw ConfigError("eta must be >= 1");
  if (max_evals < 10 || refine_evals < 4) throw ConfigError("optimizer budgets too small");
  if (trunc_threshold < 0.0) throw ConfigError("trunc_threshold must be >= 0");
  if (trunc_cap < 1) throw ConfigError("trunc_cap must be >= 1");
  if (exec != "serial" && exec != "parallel") throw ConfigError("exec must be serial|parallel");
  if (mean_mode != "conditional" && mean_mode != "posterior")
    throw ConfigError("mean_mode must be conditional|posterior");
  if (n_per_interval < 1) throw ConfigError("N must be >= 1");
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  for (int m : ms)
    if (m < 1) throw ConfigError("m values must be >= 1");
  for (double t : thetas)
    if (t < 0.0 || t >= 1.0) throw ConfigError("theta values must be in [0,1)");
}

FilterOptions RunConfig::filter_options() const {
  FilterOptions opt;
  opt.truncation.threshold = trunc_threshold;
  opt.truncation.cap = trunc_cap;
  opt.exec = exec == "serial" ? StepExec::Serial : StepExec::Parallel;
  opt.mean_mode =
      mean_mode == "posterior" ? MixtureMeanMode::PosteriorMean : MixtureMeanMode::Conditional;
  return opt;
}

MbocConfig RunConfig::mboc_config() const {
  MbocConfig mc;
  mc.mu0 = mu0;
  mc.sigma0_sq = sigma0_sq;
  mc.sigma_init_sq = sigma_init_sq;
  mc.rho_init = rho_init;
  mc.lambda_init = {omega0, alpha0, beta0, sigma_sq0};
  mc.eta = eta;
  mc.max_evals = max_evals;
  mc.refine_evals = refine_evals;
  mc.warm_start = warm_start;
  return mc;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "tsla-1min") {
    c.n_per_interval = 240;
    c.eta = 20;
  } else if (name == "tsla-3min") {
    c.n_per_interval = 730;
    c.eta = 10;
  } else if (name == "msft-1min" || name == "msft-3min") {
    c.n_per_interval = name == "msft-1min" ? 400 : 1200;
    c.eta = name == "msft-1min" ? 20 : 10;
    c.sigma0_sq = 15e7;
    c.sigma_sq = 15e8;
    c.sigma_init_sq = 15e8;
    c.sigma_sq0 = 15e8;
    c.rho = 0.3;
    c.rho_sweep = {0.2, 0.3, 0.4};
    c.rho_init = 0.3;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

std::vector<std::string> preset_names() {
  return {"tsla-1min", "tsla-3min", "msft-1min", "msft-3min"};
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig apply_config_json(const RunConfig& base, const std::filesystem::path& json_path) {
  std::ifstream f(json_path);
  if (!f) throw ConfigError("cannot open config file: " + json_path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + json_path.string() + ": " + e.what());
  }

  static const std::vector<std::string> known = {
      "model", "cp_prob", "mu0", "sigma0_sq", "sigma_sq", "rho", "rho_sweep", "rho_init",
      "sigma_init_sq", "omega0", "alpha0", "beta0", "sigma_sq0", "eta", "max_evals",
      "refine_evals", "warm_start", "trunc_threshold", "trunc_cap", "exec", "mean_mode", "n_per_interval",
      "price_scale", "carry_overnight", "thetas", "ms", "k_max", "seed"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw ConfigError("config file: unknown key '" + key + "'");
  }

  RunConfig c = base;
  if (j.contains("model")) c.model = model_kind_from_string(j.at("model").get<std::string>());
  maybe(j, "cp_prob", c.cp_prob);
  maybe(j, "mu0", c.mu0);
  maybe(j, "sigma0_sq", c.sigma0_sq);
  maybe(j, "sigma_sq", c.sigma_sq);
  maybe(j, "rho", c.rho);
  maybe(j, "rho_sweep", c.rho_sweep);
  maybe(j, "rho_init", c.rho_init);
  maybe(j, "sigma_init_sq", c.sigma_init_sq);
  maybe(j, "omega0", c.omega0);
  maybe(j, "alpha0", c.alpha0);
  maybe(j, "beta0", c.beta0);
  maybe(j, "sigma_sq0", c.sigma_sq0);
  maybe(j, "eta", c.eta);
  maybe(j, "max_evals", c.max_evals);
  maybe(j, "refine_evals", c.refine_evals);
  maybe(j, "warm_start", c.warm_start);
  maybe(j, "trunc_threshold", c.trunc_threshold);
  maybe(j, "trunc_cap", c.trunc_cap);
  maybe(j, "exec", c.exec);
  maybe(j, "mean_mode", c.mean_mode);
  maybe(j, "n_per_interval", c.n_per_interval);
  maybe(j, "price_scale", c.price_scale);
  maybe(j, "carry_overnight", c.carry_overnight);
  maybe(j, "thetas", c.thetas);
  maybe(j, "ms", c.ms);
  maybe(j, "k_max", c.k_max);
  maybe(j, "seed", c.seed);
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["model"] = to_string(c.model);
  j["cp_prob"] = c.cp_prob;
  j["mu0"] = c.mu0;
  j["sigma0_sq"] = c.sigma0_sq;
  j["sigma_sq"] = c.sigma_sq;
  j["rho"] = c.rho;
  j["rho_sweep"] = c.rho_sweep;
  j["rho_init"] = c.rho_init;
  j["sigma_init_sq"] = c.sigma_init_sq;
  j["omega0"] = c.omega0;
  j["alpha0"] = c.alpha0;
  j["beta0"] = c.beta0;
  j["sigma_sq0"] = c.sigma_sq0;
  j["eta"] = c.eta;
  j["max_evals"] = c.max_evals;
  j["refine_evals"] = c.refine_evals;
  j["warm_start"] = c.warm_start;
  j["trunc_threshold"] = c.trunc_threshold;
  j["trunc_cap"] = c.trunc_cap;
  j["exec"] = c.exec;
  j["mean_mode"] = c.mean_mode;
  j["n_per_interval"] = c.n_per_interval;
  j["price_scale"] = c.price_scale;
  j["carry_overnight"] = c.carry_overnight;
  j["thetas"] = c.thetas;
  j["ms"] = c.ms;
  j["k_max"] = c.k_max;
  j["seed"] = c.seed;
  return j.dump(2);
}

std::unique_ptr<Detector> make_detector(const RunConfig& config) {
  return make_detector(config, config.model);
}

std::unique_ptr<Detector> make_detector(const RunConfig& config, ModelKind kind,
                                        std::optional<double> rho_override) {
  config.validate();
  const Hazard hazard(config.cp_prob);
  const FilterOptions options = config.filter_options();

  switch (kind) {
    case ModelKind::Bocpd:
      return std::make_unique<BocpdDetector>(
          IidGaussianUpm(config.mu0, config.sigma0_sq, config.sigma_sq), hazard, options);
    case ModelKind::Mbo:
      return std::make_unique<MboDetector>(
          Ar1Upm(config.mu0, config.sigma0_sq, config.sigma_sq,
                 rho_override.value_or(config.rho)),
          hazard, options);
    case ModelKind::Mboc:
      return std::make_unique<MbocDetector>(config.mboc_config(), hazard, options);
  }
  throw ConfigError("unreachable model kind");
}

}  // namespace flowregime
