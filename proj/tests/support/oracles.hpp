// Test-only reference implementations, deliberately independent of the
// streaming code paths they check: segment marginals via dense Cholesky
// factorization and run-length posteriors via exhaustive enumeration of
// reset configurations.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kLog2Pi = 1.8378770664093454836;

struct GaussianSegmentModel {
  double mu0 = 0.0;
  double sigma0_sq = 1.0;
  double sigma_sq = 1.0;  // unconditional within-segment variance
  double rho = 0.0;       // AR(1) correlation; 0 gives the i.i.d. model
};

// log N(x; mu, Sigma) with Sigma = sigma_sq * rho^|i-j| + sigma0_sq.
inline double dense_segment_loglik(std::span<const double> x,
                                   const GaussianSegmentModel& m) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;

  std::vector<double> cov(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double lagcov =
          m.sigma_sq * std::pow(m.rho, std::fabs(double(i) - double(j)));
      cov[i * n + j] = lagcov + m.sigma0_sq;
    }

  // Cholesky: cov = L L^T
  std::vector<double> chol(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = cov[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= chol[i * n + k] * chol[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("oracle: covariance not positive definite");
        chol[i * n + i] = std::sqrt(s);
      } else {
        chol[i * n + j] = s / chol[j * n + j];
      }
    }
  }

  // solve L z = (x - mu)
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i] - m.mu0;
    for (std::size_t k = 0; k < i; ++k) s -= chol[i * n + k] * z[k];
    z[i] = s / chol[i * n + i];
  }

  double quad = 0.0, logdet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    quad += z[i] * z[i];
    logdet += 2.0 * std::log(chol[i * n + i]);
  }
  return -0.5 * (double(n) * kLog2Pi + logdet + quad);
}

inline double lse2(double a, double b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (a == -inf) return b;
  if (b == -inf) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Exact run-length posterior rows p(r_t | x_{1:t}) for t = 1..T, by scoring
// every partition of the prefix into contiguous segments. A break between
// consecutive observations occurs with probability cp_prob; the run length
// r_t is the position of x_t inside its segment (0 when x_t opens one).
// Cost 2^(t-1) configurations per prefix.
inline std::vector<std::map<std::int64_t, double>> enumerate_posterior(
    std::span<const double> x, double cp_prob, const GaussianSegmentModel& model) {
  const std::size_t t_len = x.size();
  if (t_len > 20) throw std::runtime_error("enumerate_posterior: series too long (max 20)");

  const double inf = std::numeric_limits<double>::infinity();
  const double logq = std::log(cp_prob);
  const double log1mq = cp_prob < 1.0 ? std::log1p(-cp_prob) : -inf;

  // memoize segment marginals over [a, b) windows
  std::map<std::pair<std::size_t, std::size_t>, double> seg;
  auto segment = [&](std::size_t a, std::size_t b) {
    const auto key = std::make_pair(a, b);
    const auto it = seg.find(key);
    if (it != seg.end()) return it->second;
    const double v = dense_segment_loglik(x.subspan(a, b - a), model);
    seg.emplace(key, v);
    return v;
  };

  std::vector<std::map<std::int64_t, double>> rows(t_len);
  for (std::size_t t = 1; t <= t_len; ++t) {
    std::map<std::int64_t, double> log_weights;
    const std::uint64_t n_cfg = 1ull << (t - 1);
    for (std::uint64_t mask = 0; mask < n_cfg; ++mask) {
      // bit g set = break between x_{g} and x_{g+1} (1-based positions)
      if (cp_prob >= 1.0 && mask + 1 != n_cfg) continue;  // only all-breaks possible

      double lp = 0.0;
      std::size_t seg_start = 0;  // 0-based start of the open segment
      for (std::size_t g = 1; g < t; ++g) {
        const bool brk = mask & (1ull << (g - 1));
        lp += brk ? logq : log1mq;
        if (brk) {
          lp += segment(seg_start, g);
          seg_start = g;
        }
      }
      lp += segment(seg_start, t);

      const std::int64_t run_length = static_cast<std::int64_t>(t - 1 - seg_start);
      auto [it, inserted] = log_weights.emplace(run_length, lp);
      if (!inserted) it->second = lse2(it->second, lp);
    }

    double norm = -inf;
    for (const auto& [r, lw] : log_weights) norm = lse2(norm, lw);
    for (auto& [r, lw] : log_weights) rows[t - 1][r] = std::exp(lw - norm);
  }
  return rows;
}

}  // namespace oracle
