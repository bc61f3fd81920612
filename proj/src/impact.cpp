#include "flowregime/impact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "flowregime/errors.hpp"
#include "flowregime/math_util.hpp"

namespace flowregime {

namespace {

struct Accumulator {
  KahanSum sum, sum_sq;
  std::size_t n = 0;

  void add(double v) {
    sum.add(v);
    sum_sq.add(v * v);
    ++n;
  }
  double mean() const { return n > 0 ? sum.value() / static_cast<double>(n) : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, sum_sq.value() / static_cast<double>(n) - m * m);
    return std::sqrt(var / static_cast<double>(n));
  }
};

void finalize(PredictorCurve& curve, const std::vector<Accumulator>& acc) {
  for (std::size_t j = 0; j < acc.size(); ++j) {
    if (acc[j].n == 0) continue;
    curve.k.push_back(static_cast<std::int64_t>(j) + 1);
    curve.value.push_back(acc[j].mean());
    curve.se.push_back(acc[j].se());
    curve.count.push_back(acc[j].n);
  }
}

}  // namespace

RegimeImbalance regime_imbalance(std::span<const double> x, const Regime& regime) {
  if (regime.end > x.size() || regime.length() == 0)
    throw ConfigError("regime_imbalance: regime out of range or empty");
  KahanSum net, gross;
  for (std::size_t t = regime.begin; t < regime.end; ++t) {
    net.add(x[t]);
    gross.add(std::fabs(x[t]));
  }
  RegimeImbalance out;
  out.sign = sign_of(net.value());
  out.z = gross.value() > 0.0 ? std::fabs(net.value()) / gross.value() : 0.0;
  return out;
}

ImpactCurve impact_curve(const FlowSeries& series, std::span<const Regime> regimes,
                         double theta, std::int64_t k_max, bool carry_overnight) {
  if (theta < 0.0 || theta >= 1.0) throw ConfigError("impact_curve: theta must be in [0,1)");
  ImpactCurve curve;
  curve.theta = theta;

  std::vector<Accumulator> acc(static_cast<std::size_t>(k_max) + 1);
  for (const Regime& r : regimes) {
    const std::ptrdiff_t prev = series.prev_price_index(r.begin, carry_overnight);
    if (prev < 0) continue;
    const RegimeImbalance imb = regime_imbalance(series.x, r);
    if (!(imb.z > theta) || imb.sign == 0) continue;

    const double p_ref = series.logp[static_cast<std::size_t>(prev)];
    const std::size_t span_k =
        std::min<std::size_t>(r.length() - 1, static_cast<std::size_t>(k_max));
    for (std::size_t k = 0; k <= span_k; ++k) {
      const double move = series.logp[r.begin + k] - p_ref;
      acc[k].add(static_cast<double>(imb.sign) * move * kBasisPoints);
    }
  }

  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (acc[k].n == 0) continue;
    curve.k.push_back(static_cast<std::int64_t>(k));
    curve.impact_bp.push_back(acc[k].mean());
    curve.se.push_back(acc[k].se());
    curve.count.push_back(acc[k].n);
  }
  return curve;
}

PowerLawFit fit_power_law(std::span<const double> q, std::span<const double> y,
                          bool remove_outliers) {
  if (q.size() != y.size()) throw ConfigError("fit_power_law: size mismatch");
  for (double v : q)
    if (!(v > 0.0)) throw ConfigError("fit_power_law: all volumes must be positive");

  std::vector<double> qs, ys;
  qs.reserve(q.size());
  ys.reserve(y.size());
  PowerLawFit fit;
  fit.outliers_removed = remove_outliers;

  if (remove_outliers && y.size() >= 4) {
    std::vector<double> ycopy(y.begin(), y.end());
    const double q1 = quantile(ycopy, 0.25);
    const double q3 = quantile(ycopy, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - 1.5 * iqr;
    const double hi = q3 + 1.5 * iqr;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] < lo || y[i] > hi) continue;
      qs.push_back(q[i]);
      ys.push_back(y[i]);
    }
    fit.n_outliers = y.size() - ys.size();
  } else {
    qs.assign(q.begin(), q.end());
    ys.assign(y.begin(), y.end());
  }

  const std::size_t n = qs.size();
  if (n < 3) throw ConfigError("fit_power_law: fewer than 3 points after filtering");

  // Start from log-log least squares over the positive responses.
  double a0 = 0.0, g0 = 0.5;
  {
    KahanSum sx, sy, sxx, sxy;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(ys[i] > 0.0)) continue;
      const double lx = std::log(qs[i]);
      const double ly = std::log(ys[i]);
      sx.add(lx);
      sy.add(ly);
      sxx.add(lx * lx);
      sxy.add(lx * ly);
      ++m;
    }
    if (m >= 2) {
      const double mm = static_cast<double>(m);
      const double den = mm * sxx.value() - sx.value() * sx.value();
      if (std::fabs(den) > 1e-12) {
        g0 = (mm * sxy.value() - sx.value() * sy.value()) / den;
        a0 = std::exp((sy.value() - g0 * sx.value()) / mm);
      } else {
        m = 0;
      }
    }
    if (m < 2) {
      std::vector<double> ay;
      ay.reserve(n);
      for (double v : ys) ay.push_back(std::fabs(v));
      a0 = std::max(quantile(ay, 0.5), 1e-12);
      g0 = 0.5;
    }
  }

  // Levenberg-Marquardt on (A, gamma).
  double a = a0, g = g0;
  double lambda = 1e-3;
  auto ssr_at = [&](double aa, double gg) {
    KahanSum s;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - aa * std::pow(qs[i], gg);
      s.add(r * r);
    }
    return s.value();
  };
  double ssr = ssr_at(a, g);
  for (int iter = 0; iter < 200; ++iter) {
    double j11 = 0, j12 = 0, j22 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pw = std::pow(qs[i], g);
      const double f = a * pw;
      const double r = ys[i] - f;
      const double da = pw;
      const double dg = f * std::log(qs[i]);
      j11 += da * da;
      j12 += da * dg;
      j22 += dg * dg;
      g1 += da * r;
      g2 += dg * r;
    }
    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      const double h11 = j11 * (1.0 + lambda), h22 = j22 * (1.0 + lambda);
      const double det = h11 * h22 - j12 * j12;
      if (std::fabs(det) < 1e-300) break;
      const double step_a = (h22 * g1 - j12 * g2) / det;
      const double step_g = (h11 * g2 - j12 * g1) / det;
      const double na = a + step_a;
      const double ng = g + step_g;
      const double nssr = std::isfinite(na) && std::isfinite(ng) ? ssr_at(na, ng)
                                                                 : std::numeric_limits<double>::max();
      if (nssr < ssr) {
        a = na;
        g = ng;
        ssr = nssr;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
    if (ssr < 1e-28) break;
  }

  // Gauss-Newton covariance at the optimum.
  double j11 = 0, j12 = 0, j22 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pw = std::pow(qs[i], g);
    const double da = pw;
    const double dg = a * pw * std::log(qs[i]);
    j11 += da * da;
    j12 += da * dg;
    j22 += dg * dg;
  }
  const double dof = static_cast<double>(n > 2 ? n - 2 : 1);
  const double s2 = ssr / dof;
  const double det = j11 * j22 - j12 * j12;
  fit.a = a;
  fit.gamma = g;
  if (det > 0.0) {
    fit.se_a = std::sqrt(std::max(0.0, s2 * j22 / det));
    fit.se_gamma = std::sqrt(std::max(0.0, s2 * j11 / det));
  }
  fit.n_used = n;
  return fit;
}

PredictorCurve online_flow_predictor(std::span<const double> x,
                                     std::span<const std::int64_t> cp_times, int m,
                                     std::int64_t k_max) {
  if (m < 1) throw ConfigError("flow predictor: m must be >= 1");
  PredictorCurve curve;
  curve.m = m;
  std::vector<Accumulator> acc(static_cast<std::size_t>(k_max));

  const std::int64_t n = static_cast<std::int64_t>(x.size());
  for (std::size_t ci = 0; ci < cp_times.size(); ++ci) {
    const std::int64_t start = cp_times[ci] - 1;  // 0-based regime start
    if (start + m > n) continue;
    // the first m intervals must not contain a later detected break
    if (ci + 1 < cp_times.size() && cp_times[ci + 1] - 1 < start + m) continue;

    KahanSum flow;
    for (int j = 0; j < m; ++j) flow.add(x[static_cast<std::size_t>(start + j)]);
    const int s0 = sign_of(flow.value());
    if (s0 == 0) continue;

    for (std::int64_t k = 1; k <= k_max; ++k) {
      const std::int64_t idx = start + m - 1 + k;
      if (idx >= n) break;
      const int s1 = sign_of(x[static_cast<std::size_t>(idx)]);
      if (s1 == 0) continue;
      acc[static_cast<std::size_t>(k - 1)].add(static_cast<double>(s0 * s1));
    }
  }
  finalize(curve, acc);
  return curve;
}

PredictorCurve unconditional_flow_predictor(std::span<const double> x, int m,
                                            std::int64_t k_max) {
  if (m < 1) throw ConfigError("flow predictor: m must be >= 1");
  PredictorCurve curve;
  curve.m = m;
  std::vector<Accumulator> acc(static_cast<std::size_t>(k_max));

  const std::int64_t n = static_cast<std::int64_t>(x.size());
  for (std::int64_t start = 0; start + m <= n; ++start) {
    KahanSum flow;
    for (int j = 0; j < m; ++j) flow.add(x[static_cast<std::size_t>(start + j)]);
    const int s0 = sign_of(flow.value());
    if (s0 == 0) continue;
    for (std::int64_t k = 1; k <= k_max; ++k) {
      const std::int64_t idx = start + m - 1 + k;
      if (idx >= n) break;
      const int s1 = sign_of(x[static_cast<std::size_t>(idx)]);
      if (s1 == 0) continue;
      acc[static_cast<std::size_t>(k - 1)].add(static_cast<double>(s0 * s1));
    }
  }
  finalize(curve, acc);
  return curve;
}

PredictorCurve online_impact_predictor(const FlowSeries& series,
                                       std::span<const std::int64_t> cp_times, int m,
                                       std::int64_t k_max) {
  if (m < 1) throw ConfigError("impact predictor: m must be >= 1");
  PredictorCurve curve;
  curve.m = m;
  std::vector<Accumulator> acc(static_cast<std::size_t>(k_max));

  const std::int64_t n = static_cast<std::int64_t>(series.size());
  for (std::size_t ci = 0; ci < cp_times.size(); ++ci) {
    const std::int64_t start = cp_times[ci] - 1;
    if (start + m > n) continue;
    if (ci + 1 < cp_times.size() && cp_times[ci + 1] - 1 < start + m) continue;

    KahanSum flow;
    for (int j = 0; j < m; ++j) flow.add(series.x[static_cast<std::size_t>(start + j)]);
    const int s0 = sign_of(flow.value());
    if (s0 == 0) continue;

    const double p_ref = series.logp[static_cast<std::size_t>(start + m - 1)];
    for (std::int64_t k = 1; k <= k_max; ++k) {
      const std::int64_t idx = start + m - 1 + k;
      if (idx >= n) break;
      const double move = series.logp[static_cast<std::size_t>(idx)] - p_ref;
      acc[static_cast<std::size_t>(k - 1)].add(static_cast<double>(s0) * move * kBasisPoints);
    }
  }
  finalize(curve, acc);
  return curve;
}

PredictorCurve unconditional_impact_predictor(const FlowSeries& series, int m,
                                              std::int64_t k_max) {
  if (m < 1) throw ConfigError("impact predictor: m must be >= 1");
  PredictorCurve curve;
  curve.m = m;
  std::vector<Accumulator> acc(static_cast<std::size_t>(k_max));

  const std::int64_t n = static_cast<std::int64_t>(series.size());
  for (std::int64_t start = 0; start + m <= n; ++start) {
    KahanSum flow;
    for (int j = 0; j < m; ++j) flow.add(series.x[static_cast<std::size_t>(start + j)]);
    const int s0 = sign_of(flow.value());
    if (s0 == 0) continue;
    const double p_ref = series.logp[static_cast<std::size_t>(start + m - 1)];
    for (std::int64_t k = 1; k <= k_max; ++k) {
      const std::int64_t idx = start + m - 1 + k;
      if (idx >= n) break;
      const double move = series.logp[static_cast<std::size_t>(idx)] - p_ref;
      acc[static_cast<std::size_t>(k - 1)].add(static_cast<double>(s0) * move * kBasisPoints);
    }
  }
  finalize(curve, acc);
  return curve;
}

std::vector<double> synthesize_prices(std::span<const double> x,
                                      std::span<const Regime> true_regimes,
                                      const PriceImpactSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const double amp = spec.a_bp / kBasisPoints;
  const double noise = spec.noise_bp / kBasisPoints;

  std::vector<double> logp(x.size(), spec.p0);
  double base = spec.p0;
  for (const Regime& r : true_regimes) {
    KahanSum net;
    for (std::size_t t = r.begin; t < r.end; ++t) net.add(x[t]);
    const int eps = sign_of(net.value());

    KahanSum cum;
    double end_level = base;
    for (std::size_t t = r.begin; t < r.end; ++t) {
      cum.add(x[t]);
      const double level =
          base + static_cast<double>(eps) * amp * std::pow(std::fabs(cum.value()), spec.gamma);
      const double eta = noise > 0.0 ? noise * unit_normal(rng) : 0.0;
      logp[t] = level + eta;
      end_level = level;
    }
    base = end_level;
  }
  return logp;
}

}  // namespace flowregime
