#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowregime/detector.hpp"
#include "flowregime/score_driven.hpp"

namespace flowregime {

struct MbocConfig {
  double mu0 = 0.0;
  double sigma0_sq = 1e7;
  double sigma_init_sq = 1e8;  // UPM variance until the first estimation
  double rho_init = 0.2;
  ScoreDrivenParams lambda_init{};
  // Re-estimation threshold: the filtered window must hold more than eta
  // intervals. A very large value disables estimation entirely.
  double eta = 20;
  int max_evals = 500;
  int refine_evals = 40;  // budget for the warm-started refinement pass
  double spread_tol = 1e-8;
  // Warm-start each estimation from the previous estimate (with a short
  // refinement pass when the window only grew by one point). When false,
  // every estimation restarts from lambda_init; the restart anchors the
  // short-window fits and tracks the correlation path better.
  bool warm_start = false;
};

// Run-length detector with the time-varying-correlation predictive model.
// Each step: update the posterior with the correlation filtered at the
// previous step, then (when the most likely window is long enough)
// re-estimate the recursion parameters on that window demeaned by its
// posterior mean and filter the correlation forward for the next step.
class MbocDetector : public Detector {
 public:
  MbocDetector(MbocConfig config, Hazard hazard, FilterOptions options);

  StepOutputs step(double x) override;
  PredictiveMixture mixture() const override { return filter_.mixture(); }
  std::vector<PosteriorCell> posterior_row() const override {
    return filter_.posterior_row();
  }
  std::int64_t time() const override { return filter_.time(); }
  double log_evidence() const override { return filter_.log_evidence(); }

  double current_rho() const { return rho_; }
  const ScoreDrivenParams& current_params() const { return lambda_; }
  std::size_t estimation_count() const { return estimation_count_; }
  RunLengthFilter<TvAr1Upm>& filter() { return filter_; }

 private:
  void maybe_estimate();

  MbocConfig config_;
  RunLengthFilter<TvAr1Upm> filter_;
  std::vector<double> history_;  // raw observations; windows are suffixes
  std::vector<double> window_;   // scratch for the demeaned slice

  double rho_;
  ScoreDrivenParams lambda_;
  bool estimated_once_ = false;
  bool last_opt_converged_ = false;
  std::int64_t last_argmax_ = -1;
  std::size_t estimation_count_ = 0;
};

}  // namespace flowregime
