#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "flowregime/rl_engine.hpp"
#include "flowregime/upm.hpp"

namespace flowregime {

struct StepOutputs {
  std::int64_t argmax_run_length = 0;
  bool cp = false;
  double mu_hat = 0.0;
  double sigma_paper = 0.0;
  double sigma_full = 0.0;
};

// Streaming front shared by all detector variants so the CLI and the
// evaluation code can drive them uniformly.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual StepOutputs step(double x) = 0;
  virtual PredictiveMixture mixture() const = 0;
  virtual std::vector<PosteriorCell> posterior_row() const = 0;
  virtual std::int64_t time() const = 0;
  virtual double log_evidence() const = 0;
};

template <class Model>
class FilterDetector : public Detector {
 public:
  FilterDetector(Model model, Hazard hazard, FilterOptions options)
      : filter_(std::move(model), hazard, options) {}

  StepOutputs step(double x) override {
    filter_.step(x);
    return outputs();
  }

  PredictiveMixture mixture() const override { return filter_.mixture(); }
  std::vector<PosteriorCell> posterior_row() const override {
    return filter_.posterior_row();
  }
  std::int64_t time() const override { return filter_.time(); }
  double log_evidence() const override { return filter_.log_evidence(); }

  RunLengthFilter<Model>& filter() { return filter_; }

 protected:
  StepOutputs outputs() const {
    StepOutputs out;
    out.argmax_run_length = filter_.argmax_run_length();
    out.cp = out.argmax_run_length == 0;
    const PredictiveMixture mix = filter_.mixture();
    out.mu_hat = mix.mean;
    out.sigma_paper = mix.sigma_paper;
    out.sigma_full = mix.sigma_full;
    return out;
  }

  RunLengthFilter<Model> filter_;
};

using BocpdDetector = FilterDetector<IidGaussianUpm>;
using MboDetector = FilterDetector<Ar1Upm>;

struct DetectionOutput {
  // mu_hat[i] is the forecast issued after observing x[i]; it predicts
  // x[i+1]. prior_mu is the forecast of x[0] from the empty state.
  std::vector<double> mu_hat;
  std::vector<double> sigma_paper;
  std::vector<double> sigma_full;
  std::vector<std::int64_t> argmax_r;
  std::vector<std::uint8_t> cp_flag;
  std::vector<std::int64_t> cp_times;  // 1-based
  double prior_mu = 0.0;
  double prior_sigma_paper = 0.0;
  double prior_sigma_full = 0.0;
  double log_evidence = 0.0;
  std::vector<std::vector<PosteriorCell>> rows;  // kept only on request

  // Forecast series aligned with the observations: element i predicts x[i].
  std::vector<double> one_step_forecasts() const {
    std::vector<double> f;
    f.reserve(mu_hat.size());
    f.push_back(prior_mu);
    for (std::size_t i = 0; i + 1 < mu_hat.size(); ++i) f.push_back(mu_hat[i]);
    return f;
  }
};

DetectionOutput run_detection(Detector& det, std::span<const double> x,
                              bool keep_rows = false);

}  // namespace flowregime
