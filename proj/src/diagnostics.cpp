#include "flowregime/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "flowregime/errors.hpp"
#include "flowregime/math_util.hpp"
#include "flowregime/upm.hpp"

namespace flowregime {

std::vector<Regime> extract_regimes(std::span<const std::int64_t> argmax_path) {
  std::vector<Regime> regimes;
  const std::size_t n = argmax_path.size();
  if (n == 0) return regimes;

  std::size_t start = 0;
  for (std::size_t t = 1; t < n; ++t) {
    if (argmax_path[t] == 0) {
      regimes.push_back({start, t, false});
      start = t;
    }
  }
  regimes.push_back({start, n, true});
  return regimes;
}

double mse(std::span<const double> predictions, std::span<const double> realized) {
  if (predictions.size() != realized.size())
    throw ConfigError("mse: prediction/realization length mismatch");
  if (predictions.empty()) throw ConfigError("mse: empty sample");
  KahanSum s;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - realized[i];
    s.add(d * d);
  }
  return s.value() / static_cast<double>(predictions.size());
}

TestResult jarque_bera(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 8) return {0.0, 1.0, true};

  const double m = mean_of(sample);
  KahanSum m2, m3, m4;
  for (double v : sample) {
    const double d = v - m;
    m2.add(d * d);
    m3.add(d * d * d);
    m4.add(d * d * d * d);
  }
  const double nn = static_cast<double>(n);
  const double var = m2.value() / nn;
  if (var <= 0.0) return {0.0, 1.0, true};

  const double skew = (m3.value() / nn) / std::pow(var, 1.5);
  const double kurt = (m4.value() / nn) / (var * var);
  const double jb = nn / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
  return {jb, chi2_sf(jb, 2.0), false};
}

TestResult ljung_box(std::span<const double> residuals, std::size_t lags) {
  const std::size_t n = residuals.size();
  if (lags < 1 || n <= lags) return {0.0, 1.0, true};
  if (variance_of(residuals) <= 0.0) return {0.0, 1.0, true};

  const double nn = static_cast<double>(n);
  KahanSum q;
  for (std::size_t k = 1; k <= lags; ++k) {
    const double r = autocorrelation(residuals, k);
    q.add(r * r / (nn - static_cast<double>(k)));
  }
  const double stat = nn * (nn + 2.0) * q.value();
  return {stat, chi2_sf(stat, static_cast<double>(lags)), false};
}

std::vector<double> regime_residuals(std::span<const double> x, const Regime& regime,
                                     const ResidualModel& model) {
  if (regime.end > x.size() || regime.length() < 2)
    throw ConfigError("regime_residuals: regime must lie in the series with length >= 2");

  std::vector<double> res;
  res.reserve(regime.length());

  switch (model.kind) {
    case ResidualModel::Kind::Iid: {
      IidGaussianUpm upm(model.mu0, model.sigma0_sq, model.sigma_sq);
      auto stat = upm.fresh_statistic();
      for (std::size_t t = regime.begin; t < regime.end; ++t) {
        res.push_back(x[t] - upm.conditional_mean(stat));
        upm.extend(stat, x[t]);
      }
      break;
    }
    case ResidualModel::Kind::Ar1: {
      Ar1Upm upm(model.mu0, model.sigma0_sq, model.sigma_sq, model.rho);
      auto stat = upm.fresh_statistic();
      for (std::size_t t = regime.begin; t < regime.end; ++t) {
        res.push_back(x[t] - upm.conditional_mean(stat));
        upm.extend(stat, x[t]);
      }
      break;
    }
    case ResidualModel::Kind::TvAr1: {
      // Online refilter of the regime window: running posterior mean for the
      // level, score recursion for the correlation.
      TvAr1Upm upm(model.mu0, model.sigma0_sq, model.lambda.sigma_sq, model.rho_init);
      auto stat = upm.fresh_statistic();
      double rho = std::clamp(model.rho_init, -1.0, 1.0);
      for (std::size_t t = regime.begin; t < regime.end; ++t) {
        upm.set_rho(rho);
        const double pred = upm.conditional_mean(stat);
        res.push_back(x[t] - pred);
        if (stat.count >= 1) {
          const double mu = upm.posterior(stat).mean;
          const double u = x[t] - pred;
          const double s = score(u, stat.x_last - mu, model.lambda.sigma_sq);
          rho = std::clamp(model.lambda.omega + model.lambda.alpha * s + model.lambda.beta * rho,
                           -1.0, 1.0);
        }
        upm.extend(stat, x[t]);
      }
      break;
    }
  }
  return res;
}

std::map<std::size_t, std::size_t> regime_length_histogram(std::span<const Regime> regimes) {
  std::map<std::size_t, std::size_t> hist;
  for (const Regime& r : regimes) ++hist[r.length()];
  return hist;
}

RegimeTestSummary regime_specification_tests(std::span<const double> x,
                                             std::span<const Regime> regimes,
                                             const ResidualModel& model,
                                             std::size_t min_length, double level) {
  RegimeTestSummary out;
  for (const Regime& r : regimes) {
    if (r.length() < min_length) {
      ++out.excluded;
      continue;
    }
    ++out.tested;

    const auto sample = x.subspan(r.begin, r.length());
    const TestResult jb = jarque_bera(sample);
    if (jb.skipped)
      ++out.jb_skipped;
    else if (jb.p_value > level)
      ++out.jb_pass;

    const auto res = regime_residuals(x, r, model);
    const TestResult lb = ljung_box(res, default_lb_lags(res.size()));
    if (lb.skipped)
      ++out.lb_skipped;
    else if (lb.p_value > level)
      ++out.lb_pass;
  }
  const auto rate = [](std::size_t pass, std::size_t tested, std::size_t skipped) {
    const std::size_t den = tested - skipped;
    return den > 0 ? static_cast<double>(pass) / static_cast<double>(den) : 1.0;
  };
  out.jb_pass_rate = rate(out.jb_pass, out.tested, out.jb_skipped);
  out.lb_pass_rate = rate(out.lb_pass, out.tested, out.lb_skipped);
  return out;
}

}  // namespace flowregime
