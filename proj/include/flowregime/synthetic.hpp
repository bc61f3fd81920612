#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "flowregime/errors.hpp"
#include "flowregime/score_driven.hpp"

namespace flowregime {

// Ground-truth generator for regime-switching flow. Regime lengths are
// geometric (per-interval break probability), regime means are normal, and
// within a regime the flow is i.i.d. / AR(1) / score-driven AR(1).
struct SyntheticSpec {
  double hazard_prob = 0.0125;
  double mu0 = 0.0;
  double sigma0_sq = 10.0;
  // Within-regime variance scale: unconditional variance in constant mode
  // (AR innovations get sigma_sq*(1-rho^2)), innovation variance in
  // score-driven mode.
  double sigma_sq = 1.0;

  enum class RhoMode { Constant, ScoreDriven };
  RhoMode rho_mode = RhoMode::Constant;
  double rho = 0.0;  // constant mode
  double omega = 0.02, alpha = 0.05, beta = 0.9;  // score-driven mode
  std::optional<double> rho_start;  // score-driven start; default omega/(1-beta)

  std::int64_t length = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(hazard_prob > 0.0) || hazard_prob > 1.0)
      throw ConfigError("synthetic: hazard_prob must be in (0, 1]");
    if (sigma0_sq < 0.0 || sigma_sq <= 0.0)
      throw ConfigError("synthetic: variances must be positive");
    if (rho_mode == RhoMode::Constant && std::fabs(rho) >= 1.0)
      throw ConfigError("synthetic: |rho| must be < 1");
    if (length < 1) throw ConfigError("synthetic: length must be >= 1");
  }
};

struct SyntheticOutput {
  std::vector<double> x;
  std::vector<std::int64_t> true_cp_times;  // 1-based starts of later regimes
  std::vector<double> true_means;           // one per regime
  std::vector<double> true_rho;             // per interval (score-driven mode)
  std::vector<std::int64_t> regime_index;   // per interval, 0-based
};

SyntheticOutput simulate(const SyntheticSpec& spec);

}  // namespace flowregime
