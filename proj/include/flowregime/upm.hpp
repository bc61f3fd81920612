#pragma once

#include <cmath>
#include <cstdint>

#include "flowregime/errors.hpp"
#include "flowregime/math_util.hpp"

namespace flowregime {

struct GaussianParams {
  double mean = 0.0;
  double var = 0.0;
};

// Normal-gamma style precision-weighted pair: posterior mean = (b + mu0/s0) / (a + 1/s0).
struct PrecisionPair {
  double a = 0.0;
  double b = 0.0;
};

// ---------------------------------------------------------------------------
// i.i.d. Gaussian regimes: unknown mean, known variance, conjugate normal prior.
// ---------------------------------------------------------------------------
class IidGaussianUpm {
 public:
  struct Statistic {
    std::int64_t count = 0;
    KahanSum sum;
  };

  IidGaussianUpm(double mu0, double sigma0_sq, double sigma_sq)
      : mu0_(mu0), sigma0_sq_(sigma0_sq), sigma_sq_(sigma_sq) {
    if (sigma0_sq <= 0.0 || sigma_sq <= 0.0)
      throw ConfigError("iid model: variances must be positive");
  }

  Statistic fresh_statistic() const { return {}; }

  void extend(Statistic& s, double x) const {
    s.count += 1;
    s.sum.add(x);
  }

  GaussianParams posterior(const Statistic& s) const {
    if (s.count == 0) return {mu0_, sigma0_sq_};
    const double prec = static_cast<double>(s.count) / sigma_sq_ + 1.0 / sigma0_sq_;
    const double mean = (s.sum.value() / sigma_sq_ + mu0_ / sigma0_sq_) / prec;
    return {mean, 1.0 / prec};
  }

  // Mean of the one-step predictive density given the window in `s`.
  double conditional_mean(const Statistic& s) const { return posterior(s).mean; }

  double predictive_variance(const Statistic& s) const {
    return sigma_sq_ + posterior(s).var;
  }

  double predictive_logpdf(const Statistic& s, double x_next) const {
    const GaussianParams p = posterior(s);
    return gaussian_logpdf(x_next, p.mean, sigma_sq_ + p.var);
  }

  double mu0() const { return mu0_; }
  double sigma0_sq() const { return sigma0_sq_; }
  double sigma_sq() const { return sigma_sq_; }

 private:
  double mu0_;
  double sigma0_sq_;
  double sigma_sq_;
};

// ---------------------------------------------------------------------------
// AR(1) regimes with constant correlation. sigma_sq is the unconditional
// within-regime variance; innovations have variance sigma_sq*(1-rho^2).
// The window is summarized by (first, interior sum, last, count).
// ---------------------------------------------------------------------------
class Ar1Upm {
 public:
  struct Statistic {
    std::int64_t count = 0;
    double x_first = 0.0;
    KahanSum interior;
    double x_last = 0.0;
  };

  Ar1Upm(double mu0, double sigma0_sq, double sigma_sq, double rho)
      : mu0_(mu0), sigma0_sq_(sigma0_sq), sigma_sq_(sigma_sq), rho_(rho) {
    if (sigma0_sq <= 0.0 || sigma_sq <= 0.0)
      throw ConfigError("ar1 model: variances must be positive");
    if (std::fabs(rho) >= 1.0)
      throw ConfigError("ar1 model: |rho| must be < 1");
  }

  Statistic fresh_statistic() const { return {}; }

  void extend(Statistic& s, double x) const {
    if (s.count == 0) {
      s.x_first = x;
      s.x_last = x;
    } else if (s.count == 1) {
      s.x_last = x;
    } else {
      s.interior.add(s.x_last);
      s.x_last = x;
    }
    s.count += 1;
  }

  // Precision-weighted sufficient pair. Requires count >= 1.
  PrecisionPair ab(const Statistic& s) const { return ab_at(s, rho_, sigma_sq_); }

  GaussianParams posterior(const Statistic& s) const {
    return posterior_at(s, rho_, sigma_sq_);
  }

  double conditional_mean(const Statistic& s) const {
    if (s.count == 0) return mu0_;
    const GaussianParams p = posterior(s);
    return p.mean + rho_ * (s.x_last - p.mean);
  }

  double predictive_variance(const Statistic& s) const {
    if (s.count == 0) return sigma_sq_ + sigma0_sq_;
    const GaussianParams p = posterior(s);
    return sigma_sq_ * (1.0 - rho_ * rho_) + p.var * (1.0 - rho_) * (1.0 - rho_);
  }

  double predictive_logpdf(const Statistic& s, double x_next) const {
    if (s.count == 0) return gaussian_logpdf(x_next, mu0_, sigma_sq_ + sigma0_sq_);
    const GaussianParams p = posterior(s);
    const double mean = p.mean + rho_ * (s.x_last - p.mean);
    const double var =
        sigma_sq_ * (1.0 - rho_ * rho_) + p.var * (1.0 - rho_) * (1.0 - rho_);
    return gaussian_logpdf(x_next, mean, var);
  }

  double mu0() const { return mu0_; }
  double sigma0_sq() const { return sigma0_sq_; }
  double sigma_sq() const { return sigma_sq_; }
  double rho() const { return rho_; }

 protected:
  // Shared with the time-varying variant, which evaluates the same case
  // formulas at its current correlation.
  PrecisionPair ab_at(const Statistic& s, double rho, double sigma_sq) const {
    const double c1 = 1.0 - rho;
    const double c2 = sigma_sq * (1.0 - rho * rho);
    PrecisionPair p;
    p.a = 1.0 / sigma_sq +
          static_cast<double>(s.count - 1) * c1 * c1 / c2;
    if (s.count == 1) {
      p.b = s.x_last / sigma_sq;
    } else if (s.count == 2) {
      p.b = s.x_first / sigma_sq + c1 * (s.x_last - rho * s.x_first) / c2;
    } else {
      p.b = s.x_first / sigma_sq +
            (c1 * c1 * s.interior.value() + c1 * (s.x_last - rho * s.x_first)) / c2;
    }
    return p;
  }

  GaussianParams posterior_at(const Statistic& s, double rho, double sigma_sq) const {
    if (s.count == 0) return {mu0_, sigma0_sq_};
    const PrecisionPair ab = ab_at(s, rho, sigma_sq);
    const double prec = ab.a + 1.0 / sigma0_sq_;
    return {(ab.b + mu0_ / sigma0_sq_) / prec, 1.0 / prec};
  }

  double mu0_;
  double sigma0_sq_;
  double sigma_sq_;
  double rho_;
};

// ---------------------------------------------------------------------------
// AR(1) regimes with time-varying correlation, driven externally by the
// score filter. Here sigma_sq is the innovation variance and the one-step
// predictive variance is sigma_sq + posterior var (no (1-rho) weighting).
// rho and sigma_sq are mutated between filter steps, never inside one.
// ---------------------------------------------------------------------------
class TvAr1Upm : public Ar1Upm {
 public:
  TvAr1Upm(double mu0, double sigma0_sq, double sigma_init_sq, double rho_init)
      : Ar1Upm(mu0, sigma0_sq, sigma_init_sq, clamp_working(rho_init)) {}

  // |rho| <= 1 is allowed upstream (the filter clamps to the closed interval);
  // the working copy stays strictly inside so the a/b denominators are finite.
  void set_rho(double rho) { rho_ = clamp_working(rho); }
  void set_sigma_sq(double sigma_sq) {
    if (sigma_sq <= 0.0) throw ConfigError("tv-ar1 model: sigma_sq must be positive");
    sigma_sq_ = sigma_sq;
  }

  double conditional_mean(const Statistic& s) const {
    if (s.count == 0) return mu0_;
    const GaussianParams p = posterior(s);
    return p.mean + rho_ * (s.x_last - p.mean);
  }

  double predictive_variance(const Statistic& s) const {
    if (s.count == 0) return sigma_sq_ + sigma0_sq_;
    return sigma_sq_ + posterior(s).var;
  }

  double predictive_logpdf(const Statistic& s, double x_next) const {
    if (s.count == 0) return gaussian_logpdf(x_next, mu0_, sigma_sq_ + sigma0_sq_);
    const GaussianParams p = posterior(s);
    const double mean = p.mean + rho_ * (s.x_last - p.mean);
    return gaussian_logpdf(x_next, mean, sigma_sq_ + p.var);
  }

 private:
  static double clamp_working(double rho) {
    constexpr double lim = 1.0 - 1e-9;
    return rho > lim ? lim : (rho < -lim ? -lim : rho);
  }
};

}  // namespace flowregime
