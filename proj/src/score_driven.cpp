#include "flowregime/score_driven.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowregime/math_util.hpp"
#include "flowregime/optim.hpp"

namespace flowregime {

FilterPath sd_filter(std::span<const double> x, const ScoreDrivenParams& params,
                     double rho_init) {
  const std::size_t n = x.size();
  if (n < 2) throw ConfigError("sd_filter: window must hold at least 2 observations");
  if (params.sigma_sq <= 0.0) throw ConfigError("sd_filter: sigma_sq must be positive");

  FilterPath path;
  path.rho.reserve(n);
  path.errors.reserve(n - 1);
  path.scores.reserve(n - 1);

  double rho = std::clamp(rho_init, -1.0, 1.0);
  path.rho.push_back(rho);
  KahanSum ll;
  for (std::size_t t = 1; t < n; ++t) {
    const double u = x[t] - rho * x[t - 1];
    const double s = score(u, x[t - 1], params.sigma_sq);
    if (!std::isfinite(u) || !std::isfinite(s))
      throw NumericalError("sd_filter: non-finite recursion at window step " +
                           std::to_string(t));
    path.errors.push_back(u);
    path.scores.push_back(s);
    ll.add(gaussian_logpdf(u, 0.0, params.sigma_sq));
    rho = params.omega + params.alpha * s + params.beta * rho;
    if (rho > 1.0) {
      rho = 1.0;
      ++path.clamp_hits;
    } else if (rho < -1.0) {
      rho = -1.0;
      ++path.clamp_hits;
    }
    if (t + 1 < n) path.rho.push_back(rho);
  }
  // The recursion advanced past the last observation: the coefficient that
  // multiplies x_n when predicting the next point. It is driven by the last
  // observed transition, so it is computable online.
  path.rho_next = rho;
  path.rho.push_back(rho);
  path.log_likelihood = ll.value();
  return path;
}

namespace {

ScoreDrivenParams from_transformed(const std::vector<double>& z) {
  ScoreDrivenParams p;
  p.omega = z[0];
  p.alpha = z[1];
  p.beta = std::tanh(z[2]);
  p.sigma_sq = std::exp(z[3]);
  return p;
}

std::vector<double> to_transformed(const ScoreDrivenParams& p) {
  // atanh needs |beta| < 1; stationarity of the recursion is enforced here.
  const double b = std::clamp(p.beta, -0.999999, 0.999999);
  return {p.omega, p.alpha, std::atanh(b), std::log(p.sigma_sq)};
}

}  // namespace

ScoreDrivenParams sd_estimate(std::span<const double> x, const ScoreDrivenParams& init,
                              double rho_init, const EstimateOptions& opts,
                              bool* converged) {
  if (x.size() < 2) throw ConfigError("sd_estimate: window must hold at least 2 observations");

  auto negloglik = [&](const std::vector<double>& z) {
    return -sd_filter(x, from_transformed(z), rho_init).log_likelihood;
  };

  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.spread_tol = opts.spread_tol;
  nm.initial_step = opts.initial_step;
  const NelderMeadResult res = nelder_mead(negloglik, to_transformed(init), nm);
  if (converged) *converged = res.converged;

  const double ll_init = sd_filter(x, init, rho_init).log_likelihood;
  if (-res.fval < ll_init) return init;
  return from_transformed(res.x);
}

}  // namespace flowregime
