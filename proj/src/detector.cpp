#include "flowregime/detector.hpp"

namespace flowregime {

DetectionOutput run_detection(Detector& det, std::span<const double> x, bool keep_rows) {
  DetectionOutput out;
  const std::size_t n = x.size();
  out.mu_hat.reserve(n);
  out.sigma_paper.reserve(n);
  out.sigma_full.reserve(n);
  out.argmax_r.reserve(n);
  out.cp_flag.reserve(n);

  const PredictiveMixture prior = det.mixture();
  out.prior_mu = prior.mean;
  out.prior_sigma_paper = prior.sigma_paper;
  out.prior_sigma_full = prior.sigma_full;

  for (std::size_t i = 0; i < n; ++i) {
    const StepOutputs so = det.step(x[i]);
    out.mu_hat.push_back(so.mu_hat);
    out.sigma_paper.push_back(so.sigma_paper);
    out.sigma_full.push_back(so.sigma_full);
    out.argmax_r.push_back(so.argmax_run_length);
    out.cp_flag.push_back(so.cp ? 1 : 0);
    if (so.cp) out.cp_times.push_back(static_cast<std::int64_t>(i) + 1);
    if (keep_rows) out.rows.push_back(det.posterior_row());
  }
  out.log_evidence = det.log_evidence();
  return out;
}

}  // namespace flowregime
