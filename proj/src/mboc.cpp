#include "flowregime/mboc.hpp"

#include <algorithm>
#include <cmath>

namespace flowregime {

MbocDetector::MbocDetector(MbocConfig config, Hazard hazard, FilterOptions options)
    : config_(config),
      filter_(TvAr1Upm(config.mu0, config.sigma0_sq, config.sigma_init_sq, config.rho_init),
              hazard, options),
      rho_(std::clamp(config.rho_init, -1.0, 1.0)),
      lambda_(config.lambda_init) {
  if (config.eta < 1) throw ConfigError("mboc: eta must be >= 1");
  if (config.sigma_init_sq <= 0.0) throw ConfigError("mboc: sigma_init_sq must be positive");
}

StepOutputs MbocDetector::step(double x) {
  history_.push_back(x);
  // The posterior at t uses the correlation filtered at t-1, already loaded
  // in the model; estimation below only affects the next step.
  filter_.step(x);
  maybe_estimate();

  StepOutputs out;
  out.argmax_run_length = filter_.argmax_run_length();
  out.cp = out.argmax_run_length == 0;
  const PredictiveMixture mix = filter_.mixture();
  out.mu_hat = mix.mean;
  out.sigma_paper = mix.sigma_paper;
  out.sigma_full = mix.sigma_full;
  return out;
}

void MbocDetector::maybe_estimate() {
  const std::int64_t t = filter_.time();
  const std::int64_t i = filter_.argmax_run_length();
  // The most likely regime holds i+1 observations (run length counts from 0
  // at the regime start); estimation needs more than eta of them.
  if (t <= 1 || static_cast<double>(i + 1) <= config_.eta) {
    last_argmax_ = i;
    return;
  }

  // Posterior mean of the most likely window, at the pre-update correlation.
  double mu_i = config_.mu0;
  for (const auto& e : filter_.entries()) {
    if (e.run_length == i) {
      mu_i = filter_.model().posterior(e.stat).mean;
      break;
    }
  }

  const std::size_t len = static_cast<std::size_t>(i) + 1;
  window_.resize(len);
  const std::size_t off = history_.size() - len;
  for (std::size_t k = 0; k < len; ++k) window_[k] = history_[off + k] - mu_i;

  // First estimation searches in full from the configured start; afterwards
  // every step warm-starts from the previous estimate. When the window
  // merely grew by one point and the last search converged, a short
  // refinement pass suffices; a window jump gets the full budget but stays
  // anchored at the warm point, which regularizes the short-window fits.
  const bool incremental = config_.warm_start && estimated_once_ &&
                           last_opt_converged_ && i == last_argmax_ + 1;
  EstimateOptions opts;
  opts.max_evals = incremental ? config_.refine_evals : config_.max_evals;
  opts.spread_tol = config_.spread_tol;
  opts.initial_step =
      config_.warm_start && estimated_once_ ? (incremental ? 0.02 : 0.05) : 0.1;

  const ScoreDrivenParams& start = config_.warm_start ? lambda_ : config_.lambda_init;
  bool converged = false;
  lambda_ = sd_estimate(window_, start, config_.rho_init, opts, &converged);
  last_opt_converged_ = converged;
  ++estimation_count_;

  const FilterPath path = sd_filter(window_, lambda_, config_.rho_init);
  rho_ = path.rho.back();
  filter_.model().set_rho(rho_);
  filter_.model().set_sigma_sq(lambda_.sigma_sq);
  estimated_once_ = true;
  last_argmax_ = i;
}

}  // namespace flowregime
