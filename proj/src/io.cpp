#include "flowregime/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flowregime/errors.hpp"

namespace flowregime {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open for reading: " + path.string());
  return f;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

double to_double(const std::string& s, const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError(std::string("bad ") + what + " value '" + s + "'");
  return v;
}

}  // namespace

void write_flow_csv(const std::filesystem::path& path, const FlowSeries& series,
                    const std::vector<std::int64_t>* true_cp_times) {
  auto f = open_out(path);
  f << "t,x,logp";
  if (true_cp_times) f << ",true_cp";
  f << "\n";

  std::vector<char> is_cp;
  if (true_cp_times) {
    is_cp.assign(series.size(), 0);
    for (std::int64_t t : *true_cp_times)
      if (t >= 1 && static_cast<std::size_t>(t) <= series.size()) is_cp[t - 1] = 1;
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    f << (i + 1) << ',' << format_double(series.x[i]) << ',' << format_double(series.logp[i]);
    if (true_cp_times) f << ',' << static_cast<int>(is_cp[i]);
    f << "\n";
  }
}

FlowFile read_flow_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw ParseError("empty flow file: " + path.string());
  const auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "x" || header[2] != "logp")
    throw ParseError("flow file must start with header t,x,logp: " + path.string());
  const bool has_cp = header.size() > 3 && header[3] == "true_cp";

  FlowFile out;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 3)
      throw ParseError("flow file row " + std::to_string(row) + ": expected >= 3 columns");
    out.series.x.push_back(to_double(fields[1], "x"));
    out.series.logp.push_back(to_double(fields[2], "logp"));
    if (has_cp && fields.size() > 3 && to_double(fields[3], "true_cp") != 0.0)
      out.true_cp_times.push_back(static_cast<std::int64_t>(out.series.x.size()));
  }
  if (out.series.x.empty()) throw ParseError("flow file has no rows: " + path.string());

  const auto meta = path.parent_path() / (path.stem().string() + "_meta.json");
  if (std::filesystem::exists(meta)) {
    json j = json::parse(open_in(meta));
    if (j.contains("day_starts")) {
      out.series.day_starts.clear();
      for (const auto& d : j["day_starts"])
        out.series.day_starts.push_back(d.get<std::size_t>());
    }
  }
  return out;
}

void write_flow_meta(const std::filesystem::path& csv_path, const FlowSeries& series,
                     std::int64_t n_per_interval) {
  json j;
  j["day_starts"] = series.day_starts;
  j["executions_per_interval"] = n_per_interval;
  const auto meta = csv_path.parent_path() / (csv_path.stem().string() + "_meta.json");
  open_out(meta) << j.dump(2) << "\n";
}

void write_truth_json(const std::filesystem::path& path, const SyntheticOutput& truth) {
  json j;
  j["cp_times"] = truth.true_cp_times;
  j["theta"] = truth.true_means;
  if (!truth.true_rho.empty()) j["rho_path"] = truth.true_rho;
  open_out(path) << j.dump(2) << "\n";
}

void write_cp_times_json(const std::filesystem::path& path,
                         const std::vector<std::int64_t>& cp_times) {
  json j;
  j["cp_times"] = cp_times;
  open_out(path) << j.dump(2) << "\n";
}

std::vector<std::int64_t> read_cp_times_json(const std::filesystem::path& path) {
  json j = json::parse(open_in(path));
  std::vector<std::int64_t> out;
  for (const auto& t : j.at("cp_times")) out.push_back(t.get<std::int64_t>());
  return out;
}

void write_posterior_csv(const std::filesystem::path& path, const DetectionOutput& out) {
  auto f = open_out(path);
  f << "t,r,prob\n";
  for (std::size_t i = 0; i < out.rows.size(); ++i)
    for (const PosteriorCell& cell : out.rows[i])
      f << (i + 1) << ',' << cell.run_length << ',' << format_double(cell.prob) << "\n";
}

void write_pred_csv(const std::filesystem::path& path, const DetectionOutput& out) {
  auto f = open_out(path);
  f << "t,mu_hat,sigma_paper,sigma_full,argmax_r\n";
  f << 0 << ',' << format_double(out.prior_mu) << ',' << format_double(out.prior_sigma_paper)
    << ',' << format_double(out.prior_sigma_full) << ",0\n";
  for (std::size_t i = 0; i < out.mu_hat.size(); ++i) {
    f << (i + 1) << ',' << format_double(out.mu_hat[i]) << ','
      << format_double(out.sigma_paper[i]) << ',' << format_double(out.sigma_full[i]) << ','
      << out.argmax_r[i] << "\n";
  }
}

DetectionOutput read_pred_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || split_csv(line).size() != 5)
    throw ParseError("bad pred file header: " + path.string());

  DetectionOutput out;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5)
      throw ParseError("pred file row " + std::to_string(row) + ": expected 5 columns");
    const double t = to_double(fields[0], "t");
    if (t == 0.0) {
      out.prior_mu = to_double(fields[1], "mu_hat");
      out.prior_sigma_paper = to_double(fields[2], "sigma_paper");
      out.prior_sigma_full = to_double(fields[3], "sigma_full");
      continue;
    }
    out.mu_hat.push_back(to_double(fields[1], "mu_hat"));
    out.sigma_paper.push_back(to_double(fields[2], "sigma_paper"));
    out.sigma_full.push_back(to_double(fields[3], "sigma_full"));
    const auto r = static_cast<std::int64_t>(to_double(fields[4], "argmax_r"));
    out.argmax_r.push_back(r);
    out.cp_flag.push_back(r == 0 ? 1 : 0);
    if (r == 0) out.cp_times.push_back(static_cast<std::int64_t>(out.argmax_r.size()));
  }
  return out;
}

void write_regimes_csv(const std::filesystem::path& path, const FlowSeries& series,
                       std::span<const Regime> regimes, const ResidualModel& model) {
  auto f = open_out(path);
  f << "t_start,t_end,length,sign,Z,jb_p,lb_p,censored\n";
  for (const Regime& r : regimes) {
    const RegimeImbalance imb = regime_imbalance(series.x, r);
    TestResult jb{0.0, 1.0, true}, lb{0.0, 1.0, true};
    if (r.length() >= 2) {
      jb = jarque_bera(std::span<const double>(series.x).subspan(r.begin, r.length()));
      const auto res = regime_residuals(series.x, r, model);
      lb = ljung_box(res, default_lb_lags(res.size()));
    }
    f << (r.begin + 1) << ',' << (r.end + 1) << ',' << r.length() << ',' << imb.sign << ','
      << format_double(imb.z) << ',' << (jb.skipped ? "" : format_double(jb.p_value)) << ','
      << (lb.skipped ? "" : format_double(lb.p_value)) << ',' << (r.censored ? 1 : 0) << "\n";
  }
}

void write_histogram_csv(const std::filesystem::path& path,
                         const std::map<std::size_t, std::size_t>& hist) {
  auto f = open_out(path);
  f << "length,count\n";
  for (const auto& [len, count] : hist) f << len << ',' << count << "\n";
}

void write_impact_csv(const std::filesystem::path& path, const ImpactCurve& curve) {
  auto f = open_out(path);
  f << "k,impact_bp,se,n\n";
  for (std::size_t i = 0; i < curve.k.size(); ++i)
    f << curve.k[i] << ',' << format_double(curve.impact_bp[i]) << ','
      << format_double(curve.se[i]) << ',' << curve.count[i] << "\n";
}

void write_predictor_csv(const std::filesystem::path& path, const PredictorCurve& conditional,
                         const PredictorCurve& benchmark) {
  // rows joined on the horizon k; either side may skip a k it has no sample for
  std::map<std::int64_t, std::pair<std::ptrdiff_t, std::ptrdiff_t>> by_k;
  for (std::size_t i = 0; i < conditional.k.size(); ++i)
    by_k[conditional.k[i]].first = static_cast<std::ptrdiff_t>(i) + 1;
  for (std::size_t i = 0; i < benchmark.k.size(); ++i)
    by_k[benchmark.k[i]].second = static_cast<std::ptrdiff_t>(i) + 1;

  auto f = open_out(path);
  f << "k,conditional,se,n,benchmark,bench_se,bench_n\n";
  for (const auto& [k, idx] : by_k) {
    f << k << ',';
    if (idx.first > 0) {
      const auto i = static_cast<std::size_t>(idx.first - 1);
      f << format_double(conditional.value[i]) << ',' << format_double(conditional.se[i])
        << ',' << conditional.count[i];
    } else {
      f << ",,";
    }
    f << ',';
    if (idx.second > 0) {
      const auto i = static_cast<std::size_t>(idx.second - 1);
      f << format_double(benchmark.value[i]) << ',' << format_double(benchmark.se[i]) << ','
        << benchmark.count[i];
    } else {
      f << ",,";
    }
    f << "\n";
  }
}

}  // namespace flowregime
