#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "flowregime/errors.hpp"
#include "flowregime/hazard.hpp"
#include "flowregime/math_util.hpp"

namespace flowregime {

// Run-length hypotheses whose posterior falls below `threshold` are dropped,
// and at most `cap` entries (largest posterior first) are retained.
struct TruncationPolicy {
  double threshold = 1e-12;
  std::size_t cap = 2000;

  static TruncationPolicy none() {
    return {0.0, std::numeric_limits<std::size_t>::max()};
  }
};

enum class StepExec { Serial, Parallel };

// Eq-33-style mixture mean: Conditional uses the model one-step mean
// (mu_r + rho*(x_t - mu_r) for AR models); PosteriorMean uses mu_r for
// every model, matching the literal second line of the mixture formula.
enum class MixtureMeanMode { Conditional, PosteriorMean };

struct PosteriorCell {
  std::int64_t run_length;
  double prob;
};

struct PredictiveMixture {
  double mean = 0.0;
  double sigma_paper = 0.0;  // sqrt of posterior-variance mixture
  double sigma_full = 0.0;   // full predictive std: innovation + mean dispersion
};

struct FilterOptions {
  TruncationPolicy truncation{};
  StepExec exec = StepExec::Parallel;
  MixtureMeanMode mean_mode = MixtureMeanMode::Conditional;
  bool truncation_enabled = true;  // reference path for equivalence tests
};

// Model-agnostic run-length filter. The model supplies the predictive
// density and sufficient-statistic updates; the filter owns the hazard
// recursion, normalization, truncation and mixture outputs.
template <class Model>
class RunLengthFilter {
 public:
  struct Entry {
    std::int64_t run_length;
    double log_post;  // log p(r_t | x_{1:t}), normalized
    typename Model::Statistic stat;
  };

  RunLengthFilter(Model model, Hazard hazard, FilterOptions options = {})
      : model_(std::move(model)), hazard_(hazard), options_(options) {
    entries_.push_back(Entry{0, 0.0, model_.fresh_statistic()});
  }

  // Advance the posterior from time t-1 to t with the new observation.
  // Run length r_t is the position of x_t inside its regime: a change point
  // at t starts a new regime with x_t, scored under the prior predictive.
  void step(double x) {
    ++time_;
    if (time_ == 1) {
      // The first observation deterministically opens the first regime.
      Entry& e = entries_.front();
      const double lp = model_.predictive_logpdf(e.stat, x);
      if (!std::isfinite(lp))
        throw NumericalError("run-length filter: degenerate density at t=1");
      log_evidence_ += lp;
      model_.extend(e.stat, x);
      return;
    }

    const std::size_t n = entries_.size();
    joint_.resize(n);
    next_.resize(n + 1);

    // Per-hypothesis work is independent; slot-indexed writes keep the
    // result identical across thread counts. The kernel works on local
    // copies/pointers so the outlined parallel body never touches members.
    const Entry* src = entries_.data();
    Entry* grown = next_.data() + 1;
    double* joint = joint_.data();
    const Model model = model_;
    const double log_growth = hazard_.log_growth();
    if (options_.exec == StepExec::Parallel && n >= kParallelGrain) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const Entry& e = src[i];
        const double joint_w = e.log_post + model.predictive_logpdf(e.stat, x);
        joint[i] = joint_w;
        Entry& g = grown[i];
        g.run_length = e.run_length + 1;
        g.log_post = joint_w + log_growth;
        g.stat = e.stat;
        model.extend(g.stat, x);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const Entry& e = src[i];
        const double joint_w = e.log_post + model.predictive_logpdf(e.stat, x);
        joint[i] = joint_w;
        Entry& g = grown[i];
        g.run_length = e.run_length + 1;
        g.log_post = joint_w + log_growth;
        g.stat = e.stat;
        model.extend(g.stat, x);
      }
    }

    // Reset branch: x starts a fresh regime. Entry weights are normalized,
    // so the pooled message mass is exactly one.
    auto fresh = model_.fresh_statistic();
    const double log_reset = hazard_.log_cp() + model_.predictive_logpdf(fresh, x);
    model_.extend(fresh, x);
    next_[0] = Entry{0, log_reset, fresh};

    double step_evidence = log_reset;
    for (std::size_t i = 0; i < n; ++i)
      step_evidence = log_sum_exp(step_evidence, next_[i + 1].log_post);
    if (!std::isfinite(step_evidence))
      throw NumericalError("run-length filter: all predictive densities degenerate at t=" +
                           std::to_string(time_));
    log_evidence_ += step_evidence;
    for (auto& e : next_) e.log_post -= step_evidence;

    entries_.swap(next_);
    if (options_.truncation_enabled) truncate();
  }

  // Forecast of the next observation from the current posterior.
  PredictiveMixture mixture() const {
    KahanSum mean, post_var, second_moment;
    for (const auto& e : entries_) {
      const double p = std::exp(e.log_post);
      if (p == 0.0) continue;
      const double m = options_.mean_mode == MixtureMeanMode::Conditional
                           ? model_.conditional_mean(e.stat)
                           : model_.posterior(e.stat).mean;
      mean.add(p * m);
      post_var.add(p * model_.posterior(e.stat).var);
      second_moment.add(p * (model_.predictive_variance(e.stat) + m * m));
    }
    PredictiveMixture out;
    out.mean = mean.value();
    out.sigma_paper = std::sqrt(std::max(0.0, post_var.value()));
    out.sigma_full =
        std::sqrt(std::max(0.0, second_moment.value() - out.mean * out.mean));
    return out;
  }

  std::int64_t argmax_run_length() const {
    const Entry* best = &entries_.front();
    for (const auto& e : entries_)
      if (e.log_post > best->log_post) best = &e;
    return best->run_length;
  }

  std::vector<PosteriorCell> posterior_row() const {
    std::vector<PosteriorCell> row;
    row.reserve(entries_.size());
    for (const auto& e : entries_)
      row.push_back({e.run_length, std::exp(e.log_post)});
    return row;
  }

  std::span<const Entry> entries() const { return entries_; }
  std::int64_t time() const { return time_; }
  double log_evidence() const { return log_evidence_; }
  Model& model() { return model_; }
  const Model& model() const { return model_; }
  const FilterOptions& options() const { return options_; }

  static constexpr std::size_t kParallelGrain = 512;

 private:
  void truncate() {
    const double log_thresh =
        options_.truncation.threshold > 0.0 ? std::log(options_.truncation.threshold) : kNegInf;
    bool dropped = false;

    if (log_thresh != kNegInf) {
      const auto keep_end = std::remove_if(
          entries_.begin(), entries_.end(),
          [&](const Entry& e) { return e.log_post < log_thresh; });
      if (keep_end != entries_.end()) {
        entries_.erase(keep_end, entries_.end());
        dropped = true;
      }
    }

    if (entries_.size() > options_.truncation.cap) {
      // Keep the heaviest hypotheses; ties broken toward shorter run lengths
      // so the selection is a deterministic total order.
      std::vector<std::size_t> idx(entries_.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (entries_[a].log_post != entries_[b].log_post)
          return entries_[a].log_post > entries_[b].log_post;
        return entries_[a].run_length < entries_[b].run_length;
      });
      idx.resize(options_.truncation.cap);
      std::sort(idx.begin(), idx.end());
      std::vector<Entry> kept;
      kept.reserve(idx.size());
      for (std::size_t i : idx) kept.push_back(std::move(entries_[i]));
      entries_.swap(kept);
      dropped = true;
    }

    if (dropped && !entries_.empty()) {
      joint_.resize(entries_.size());
      for (std::size_t i = 0; i < entries_.size(); ++i) joint_[i] = entries_[i].log_post;
      const double lse = log_sum_exp(std::span<const double>(joint_.data(), entries_.size()));
      for (auto& e : entries_) e.log_post -= lse;
    }
    if (entries_.empty())
      throw NumericalError("run-length filter: truncation removed every hypothesis at t=" +
                           std::to_string(time_));
  }

  Model model_;
  Hazard hazard_;
  FilterOptions options_;
  std::vector<Entry> entries_;
  std::int64_t time_ = 0;
  double log_evidence_ = 0.0;

  // scratch, reused across steps
  std::vector<double> joint_;
  std::vector<Entry> next_;
};

}  // namespace flowregime
