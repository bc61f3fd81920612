#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowregime/detector.hpp"
#include "flowregime/mboc.hpp"

namespace flowregime {

enum class ModelKind { Bocpd, Mbo, Mboc };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);

// Resolved hyperparameters for one detector run. Shipped presets carry the
// per-stock, per-timescale defaults; a JSON config file overrides any key.
struct RunConfig {
  ModelKind model = ModelKind::Mboc;

  double cp_prob = 1.0 / 80.0;
  double mu0 = 0.0;
  double sigma0_sq = 1e7;
  double sigma_sq = 1e8;

  double rho = 0.2;                       // mbo
  std::vector<double> rho_sweep = {0.1, 0.2, 0.3};

  double rho_init = 0.2;                  // mboc
  double sigma_init_sq = 1e8;
  double omega0 = 0.08;
  double alpha0 = 0.02;
  double beta0 = 0.05;
  double sigma_sq0 = 1e8;
  double eta = 20;
  int max_evals = 500;
  int refine_evals = 40;
  bool warm_start = false;

  double trunc_threshold = 1e-12;
  std::size_t trunc_cap = 2000;
  std::string exec = "parallel";          // or "serial"
  std::string mean_mode = "conditional";  // or "posterior" (paper-literal mixture)

  std::int64_t n_per_interval = 240;
  double price_scale = 1e-4;
  bool carry_overnight = false;

  std::vector<double> thetas = {0.0, 0.5, 0.9};
  std::vector<int> ms = {1, 2, 3, 4};
  std::int64_t k_max = 20;

  std::uint64_t seed = 0;

  void validate() const;
  FilterOptions filter_options() const;
  MbocConfig mboc_config() const;
};

// Known presets: tsla-1min, tsla-3min, msft-1min, msft-3min.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Apply a JSON object of config keys on top of `base` (unknown keys rejected).
RunConfig apply_config_json(const RunConfig& base, const std::filesystem::path& json_path);

std::string config_to_json(const RunConfig& config);

std::unique_ptr<Detector> make_detector(const RunConfig& config);
std::unique_ptr<Detector> make_detector(const RunConfig& config, ModelKind kind,
                                         std::optional<double> rho_override = {});

}  // namespace flowregime
