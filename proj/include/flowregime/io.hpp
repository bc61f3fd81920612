#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowregime/detector.hpp"
#include "flowregime/diagnostics.hpp"
#include "flowregime/impact.hpp"
#include "flowregime/synthetic.hpp"
#include "flowregime/trades.hpp"

namespace flowregime {

// Round-trip-exact decimal formatting so identical runs write identical bytes.
std::string format_double(double v);

struct FlowFile {
  FlowSeries series;
  std::vector<std::int64_t> true_cp_times;  // present when the file carries truth
};

// CSV with header `t,x,logp` and optional `true_cp` column. A sidecar
// `<stem>_meta.json` with day starts is honored when present.
void write_flow_csv(const std::filesystem::path& path, const FlowSeries& series,
                    const std::vector<std::int64_t>* true_cp_times = nullptr);
FlowFile read_flow_csv(const std::filesystem::path& path);

void write_flow_meta(const std::filesystem::path& csv_path, const FlowSeries& series,
                     std::int64_t n_per_interval);

void write_truth_json(const std::filesystem::path& path, const SyntheticOutput& truth);

void write_cp_times_json(const std::filesystem::path& path,
                         const std::vector<std::int64_t>& cp_times);
std::vector<std::int64_t> read_cp_times_json(const std::filesystem::path& path);

// Sparse triplets `t,r,prob` for every retained hypothesis.
void write_posterior_csv(const std::filesystem::path& path, const DetectionOutput& out);

// `t,mu_hat,sigma_paper,sigma_full,argmax_r`; row t carries the forecast of
// x_{t+1}, and row 0 the prior forecast.
void write_pred_csv(const std::filesystem::path& path, const DetectionOutput& out);
DetectionOutput read_pred_csv(const std::filesystem::path& path);

void write_regimes_csv(const std::filesystem::path& path, const FlowSeries& series,
                       std::span<const Regime> regimes, const ResidualModel& model);

void write_histogram_csv(const std::filesystem::path& path,
                         const std::map<std::size_t, std::size_t>& hist);

void write_impact_csv(const std::filesystem::path& path, const ImpactCurve& curve);

void write_predictor_csv(const std::filesystem::path& path, const PredictorCurve& conditional,
                         const PredictorCurve& benchmark);

}  // namespace flowregime
