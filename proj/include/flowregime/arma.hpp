#pragma once

#include <span>
#include <vector>

namespace flowregime {

// ARMA(1,1) benchmark, x_t = c + phi*x_{t-1} + theta*e_{t-1} + e_t, fitted by
// conditional-sum-of-squares likelihood with innovations initialized at zero.
struct Arma11Fit {
  double c = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double sigma_sq = 0.0;
  bool boundary_warning = false;  // search pushed against |phi| or |theta| ~ 1
};

struct Arma11Forecasts {
  Arma11Fit fit;
  // forecasts[i] predicts x[i]; element 0 is the unconditional mean.
  std::vector<double> forecasts;
};

Arma11Forecasts arma11_fit_forecast(std::span<const double> x);

}  // namespace flowregime
