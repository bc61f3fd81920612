#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowregime/diagnostics.hpp"
#include "flowregime/trades.hpp"

namespace flowregime {

// Log-price differences are reported in basis points throughout.
inline constexpr double kBasisPoints = 1e4;

struct RegimeImbalance {
  int sign = 0;     // sign of the net flow in the regime
  double z = 0.0;   // |net flow| / gross flow, in [0,1]
};

RegimeImbalance regime_imbalance(std::span<const double> x, const Regime& regime);

struct ImpactCurve {
  double theta = 0.0;
  std::vector<std::int64_t> k;
  std::vector<double> impact_bp;
  std::vector<double> se;
  std::vector<std::size_t> count;
};

// Mean signed log-price move k intervals into a regime, relative to the
// price just before the regime, over regimes with imbalance above theta.
// Regimes without a defined preceding price are skipped.
ImpactCurve impact_curve(const FlowSeries& series, std::span<const Regime> regimes,
                         double theta, std::int64_t k_max, bool carry_overnight = false);

struct PowerLawFit {
  double a = 0.0;
  double gamma = 0.0;
  double se_a = 0.0;
  double se_gamma = 0.0;
  std::size_t n_used = 0;
  bool outliers_removed = false;
  std::size_t n_outliers = 0;
};

// Nonlinear least squares of y ~ A * q^gamma. Optional interquartile-range
// filter on the y sample before fitting. All q must be positive.
PowerLawFit fit_power_law(std::span<const double> q, std::span<const double> y,
                          bool remove_outliers);

struct PredictorCurve {
  int m = 1;
  std::vector<std::int64_t> k;
  std::vector<double> value;
  std::vector<double> se;
  std::vector<std::size_t> count;
};

// Sign correlation between the first m intervals of a detected regime and
// the flow k intervals later. Regime starts are online change points; a
// start qualifies only when no further change point falls inside its first
// m intervals. Zero signs are excluded from the averages.
PredictorCurve online_flow_predictor(std::span<const double> x,
                                     std::span<const std::int64_t> cp_times, int m,
                                     std::int64_t k_max);

// Same statistic over every interval, ignoring regimes.
PredictorCurve unconditional_flow_predictor(std::span<const double> x, int m,
                                            std::int64_t k_max);

// Signed price move (bp) following the first m intervals of a regime.
PredictorCurve online_impact_predictor(const FlowSeries& series,
                                       std::span<const std::int64_t> cp_times, int m,
                                       std::int64_t k_max);

// Response-function style benchmark over all intervals.
PredictorCurve unconditional_impact_predictor(const FlowSeries& series, int m,
                                              std::int64_t k_max);

struct PriceImpactSpec {
  double a_bp = 1.0;       // impact amplitude, basis points per share^gamma
  double gamma = 0.5;
  double noise_bp = 0.0;   // i.i.d. noise on each interval price
  double p0 = 4.60517018598809137;  // ln(100)
  std::uint64_t seed = 0;
};

// Test fixture: log prices whose within-regime move follows the chosen
// power law of cumulative net flow, signed by the regime flow.
std::vector<double> synthesize_prices(std::span<const double> x,
                                      std::span<const Regime> true_regimes,
                                      const PriceImpactSpec& spec);

}  // namespace flowregime
