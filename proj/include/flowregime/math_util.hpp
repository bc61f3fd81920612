#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace flowregime {

inline constexpr double kLog2Pi = 1.8378770664093454836;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log N(x; mean, var)
inline double gaussian_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Fixed left-to-right accumulation order so results do not depend on thread count.
inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v)
    if (x > m) m = x;
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Compensated summation; share volumes reach 1e8 and windows grow to the
// full series length, so plain accumulation loses low bits.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

inline double mean_of(std::span<const double> v) {
  KahanSum s;
  for (double x : v) s.add(x);
  return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

// Population variance (divide by n).
inline double variance_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  KahanSum s;
  for (double x : v) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(v.size());
}

// Sample autocorrelation at a given lag, full-sample mean and denominator.
double autocorrelation(std::span<const double> v, std::size_t lag);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

// Linear-interpolation quantile, q in [0,1]. Sorts a copy.
double quantile(std::vector<double> v, double q);

// Survival function of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double k);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

}  // namespace flowregime
