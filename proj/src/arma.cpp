#include "flowregime/arma.hpp"

#include <algorithm>
#include <cmath>

#include "flowregime/errors.hpp"
#include "flowregime/math_util.hpp"
#include "flowregime/optim.hpp"

namespace flowregime {

namespace {

constexpr double kBound = 0.999;

struct RawParams {
  double c, phi, theta;
};

RawParams from_transformed(const std::vector<double>& z) {
  return {z[0], kBound * std::tanh(z[1]), kBound * std::tanh(z[2])};
}

// Conditional sum of squares with e_1 = 0.
double css(std::span<const double> x, const RawParams& p) {
  KahanSum ssr;
  double e_prev = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double e = x[t] - p.c - p.phi * x[t - 1] - p.theta * e_prev;
    ssr.add(e * e);
    e_prev = e;
  }
  return ssr.value();
}

// Exact CSS minimizer of the AR(1) submodel (linear least squares).
RawParams ar1_css(std::span<const double> x) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size() - 1);
  for (std::size_t t = 1; t < x.size(); ++t) {
    sx += x[t - 1];
    sy += x[t];
    sxx += x[t - 1] * x[t - 1];
    sxy += x[t - 1] * x[t];
  }
  const double den = n * sxx - sx * sx;
  double phi = den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  phi = std::clamp(phi, -kBound, kBound);
  return {(sy - phi * sx) / n, phi, 0.0};
}

// Hannan-Rissanen two-stage start for the full model: residuals from a long
// autoregression, then a joint regression of x_t on (x_{t-1}, e_{t-1}).
// Near-collinear regressors (the common-factor ridge) fall back to (r1, 0).
void hannan_rissanen_start(std::span<const double> x, double& phi0, double& theta0) {
  const std::size_t n = x.size();
  const std::size_t p = std::min<std::size_t>(20, n / 10);
  const double m = mean_of(x);

  std::vector<double> r(p + 1);
  for (std::size_t k = 0; k <= p; ++k) r[k] = autocorrelation(x, k);
  std::vector<double> a(p + 1, 0.0), a_prev(p + 1, 0.0);
  double e = r[0];
  for (std::size_t k = 1; k <= p && e > 1e-12; ++k) {
    double acc = r[k];
    for (std::size_t j = 1; j < k; ++j) acc -= a_prev[j] * r[k - j];
    const double kappa = acc / e;
    a[k] = kappa;
    for (std::size_t j = 1; j < k; ++j) a[j] = a_prev[j] - kappa * a_prev[k - j];
    e *= (1.0 - kappa * kappa);
    a_prev = a;
  }

  std::vector<double> eps(n, 0.0);
  for (std::size_t t = p; t < n; ++t) {
    double pred = 0.0;
    for (std::size_t j = 1; j <= p; ++j) pred += a[j] * (x[t - j] - m);
    eps[t] = (x[t] - m) - pred;
  }

  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t t = p + 1; t < n; ++t) {
    const double u = x[t - 1] - m;
    const double v = eps[t - 1];
    const double y = x[t] - m;
    s11 += u * u;
    s12 += u * v;
    s22 += v * v;
    b1 += u * y;
    b2 += v * y;
  }
  const double corr_sq = s11 > 0.0 && s22 > 0.0 ? s12 * s12 / (s11 * s22) : 1.0;
  if (corr_sq < 0.98) {
    const double det = s11 * s22 - s12 * s12;
    phi0 = (s22 * b1 - s12 * b2) / det;
    theta0 = (s11 * b2 - s12 * b1) / det;
  } else {
    phi0 = autocorrelation(x, 1);
    theta0 = 0.0;
  }
  phi0 = std::clamp(phi0, -0.9, 0.9);
  theta0 = std::clamp(theta0, -0.9, 0.9);
}

double bic(double ssr, double n, double k) {
  return n * std::log(std::max(ssr, 1e-300) / n) + k * std::log(n);
}

}  // namespace

Arma11Forecasts arma11_fit_forecast(std::span<const double> x) {
  if (x.size() < 50) throw ConfigError("arma11: need at least 50 observations");
  const double n_eff = static_cast<double>(x.size() - 1);
  const double mean = mean_of(x);

  // Nested CSS fits. The moving-average term enters only when it earns its
  // keep, which keeps white noise off the phi = -theta ridge.
  const RawParams p0{mean, 0.0, 0.0};
  const RawParams p1 = ar1_css(x);

  double phi0 = 0.0, theta0 = 0.0;
  hannan_rissanen_start(x, phi0, theta0);
  std::vector<double> z0 = {mean * (1.0 - phi0), std::atanh(phi0 / kBound),
                            std::atanh(theta0 / kBound)};
  NelderMeadOptions opts;
  opts.max_evals = 2000;
  opts.spread_tol = 1e-9;
  opts.initial_step = 0.05;
  opts.relative_spread = true;
  const NelderMeadResult res = nelder_mead(
      [&](const std::vector<double>& z) { return css(x, from_transformed(z)); }, z0, opts);
  const RawParams p2 = from_transformed(res.x);

  const double ssr0 = css(x, p0), ssr1 = css(x, p1), ssr2 = css(x, p2);
  RawParams best = p0;
  double best_ssr = ssr0;
  double best_bic = bic(ssr0, n_eff, 1.0);
  for (const auto& [p, ssr, k] :
       {std::tuple{p1, ssr1, 2.0}, std::tuple{p2, ssr2, 3.0}}) {
    const double b = bic(ssr, n_eff, k);
    if (b < best_bic) {
      best = p;
      best_ssr = ssr;
      best_bic = b;
    }
  }

  Arma11Forecasts out;
  out.fit.c = best.c;
  out.fit.phi = best.phi;
  out.fit.theta = best.theta;
  out.fit.sigma_sq = best_ssr / n_eff;
  out.fit.boundary_warning =
      std::fabs(best.phi) > kBound - 1e-3 || std::fabs(best.theta) > kBound - 1e-3;

  out.forecasts.reserve(x.size());
  const double uncond = std::fabs(1.0 - best.phi) > 1e-12 ? best.c / (1.0 - best.phi) : mean;
  out.forecasts.push_back(uncond);
  double e_prev = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double pred = best.c + best.phi * x[t - 1] + best.theta * e_prev;
    out.forecasts.push_back(pred);
    e_prev = x[t] - pred;
  }
  return out;
}

}  // namespace flowregime
