#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "flowregime/score_driven.hpp"

namespace flowregime {

// Maximal stretch between consecutive zeros of the argmax run-length path,
// stored half-open and 0-based. `censored` marks a regime closed by the end
// of the sample rather than by a detected break.
struct Regime {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool censored = false;

  std::size_t length() const { return end - begin; }
};

std::vector<Regime> extract_regimes(std::span<const std::int64_t> argmax_path);

// Eq-style mean squared error over aligned one-step pairs.
double mse(std::span<const double> predictions, std::span<const double> realized);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool skipped = false;
};

// Normality test from sample skewness and kurtosis; chi-square(2) reference.
// Samples shorter than 8 or with zero variance are skipped.
TestResult jarque_bera(std::span<const double> sample);

// Portmanteau whiteness test on residuals; chi-square(lags) reference.
TestResult ljung_box(std::span<const double> residuals, std::size_t lags);

inline std::size_t default_lb_lags(std::size_t n) {
  const std::size_t by_n = n / 5;
  return std::max<std::size_t>(1, std::min<std::size_t>(10, by_n));
}

// Model family used when reconstructing within-regime one-step residuals.
struct ResidualModel {
  enum class Kind { Iid, Ar1, TvAr1 } kind = Kind::Iid;
  double mu0 = 0.0;
  double sigma0_sq = 1.0;
  double sigma_sq = 1.0;
  double rho = 0.0;                 // Ar1
  ScoreDrivenParams lambda{};       // TvAr1
  double rho_init = 0.0;            // TvAr1
};

// One-step prediction errors inside a regime, using the model's own filtered
// quantities (fresh statistics at the regime start).
std::vector<double> regime_residuals(std::span<const double> x, const Regime& regime,
                                     const ResidualModel& model);

std::map<std::size_t, std::size_t> regime_length_histogram(std::span<const Regime> regimes);

struct RegimeTestSummary {
  std::size_t tested = 0;
  std::size_t excluded = 0;  // shorter than min_length
  std::size_t jb_pass = 0;
  std::size_t jb_skipped = 0;
  std::size_t lb_pass = 0;
  std::size_t lb_skipped = 0;
  double jb_pass_rate = 0.0;  // non-rejections / tested, at the given level
  double lb_pass_rate = 0.0;
};

RegimeTestSummary regime_specification_tests(std::span<const double> x,
                                             std::span<const Regime> regimes,
                                             const ResidualModel& model,
                                             std::size_t min_length = 8,
                                             double level = 0.05);

}  // namespace flowregime
