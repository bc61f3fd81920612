// flowregime: regime detection and impact analysis for aggregated order flow.
//
// Subcommands: simulate, aggregate, detect, evaluate, impact.
// Option precedence: defaults < --preset < flags < --config file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowregime/arma.hpp"
#include "flowregime/config.hpp"
#include "flowregime/detector.hpp"
#include "flowregime/diagnostics.hpp"
#include "flowregime/impact.hpp"
#include "flowregime/io.hpp"
#include "flowregime/math_util.hpp"
#include "flowregime/mboc.hpp"
#include "flowregime/synthetic.hpp"
#include "flowregime/trades.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace flowregime;

namespace {

// Binds detector hyperparameter flags to a subcommand; values only apply
// when the user actually passed them, so presets keep their defaults.
struct ConfigBinder {
  std::string preset;
  std::string config_file;
  std::string model;
  double cp_prob = 0, mu0 = 0, sigma0_sq = 0, sigma_sq = 0, rho = 0, rho_init = 0;
  double sigma_init_sq = 0, omega0 = 0, alpha0 = 0, beta0 = 0, sigma_sq0 = 0, eta = 0;
  double trunc_threshold = 0;
  int max_evals = 0, refine_evals = 0;
  std::size_t trunc_cap = 0;
  std::int64_t n_per_interval = 0, k_max = 0;
  double price_scale = 0;
  bool carry_overnight = false;
  bool warm_start = false;
  std::vector<double> rho_sweep, thetas;
  std::vector<int> ms;
  std::uint64_t seed = 0;
  std::string exec, mean_mode;

  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* cmd, bool with_model) {
    opts["preset"] = cmd->add_option("--preset", preset,
                                     "named hyperparameter preset (tsla-1min, tsla-3min, "
                                     "msft-1min, msft-3min)");
    opts["config"] = cmd->add_option("--config", config_file,
                                     "JSON config file; overrides flags");
    if (with_model)
      opts["model"] =
          cmd->add_option("--model", model, "detector: bocpd|mbo|mboc")->default_str("mboc");
    opts["cp_prob"] = cmd->add_option("--cp-prob", cp_prob, "change-point probability per interval");
    opts["mu0"] = cmd->add_option("--mu0", mu0, "prior mean of the regime level");
    opts["sigma0_sq"] = cmd->add_option("--sigma0-sq", sigma0_sq, "prior variance of the regime level");
    opts["sigma_sq"] = cmd->add_option("--sigma-sq", sigma_sq, "within-regime variance");
    opts["rho"] = cmd->add_option("--rho", rho, "AR(1) correlation (mbo)");
    opts["rho_sweep"] = cmd->add_option("--rho-sweep", rho_sweep, "correlations for the mbo sweep");
    opts["rho_init"] = cmd->add_option("--rho-init", rho_init, "initial correlation (mboc)");
    opts["sigma_init_sq"] =
        cmd->add_option("--sigma-init-sq", sigma_init_sq, "initial UPM variance (mboc)");
    opts["omega0"] = cmd->add_option("--omega", omega0, "score recursion level start");
    opts["alpha0"] = cmd->add_option("--alpha", alpha0, "score loading start");
    opts["beta0"] = cmd->add_option("--beta", beta0, "score persistence start");
    opts["sigma_sq0"] = cmd->add_option("--sigma-sq0", sigma_sq0, "innovation variance start (mboc)");
    opts["eta"] = cmd->add_option("--eta", eta, "window size threshold for re-estimation (mboc)");
    opts["max_evals"] = cmd->add_option("--max-evals", max_evals, "optimizer budget");
    opts["refine_evals"] = cmd->add_option("--refine-evals", refine_evals, "warm-start budget");
    opts["warm_start"] = cmd->add_flag("--warm-start", warm_start,
                                       "warm-start the per-step estimation (mboc)");
    opts["trunc_threshold"] =
        cmd->add_option("--trunc-threshold", trunc_threshold, "posterior truncation threshold");
    opts["trunc_cap"] = cmd->add_option("--trunc-cap", trunc_cap, "max retained run lengths");
    opts["exec"] = cmd->add_option("--exec", exec, "step kernel: parallel|serial");
    opts["mean_mode"] =
        cmd->add_option("--mean-mode", mean_mode, "mixture mean: conditional|posterior");
    opts["n_per_interval"] = cmd->add_option("--N", n_per_interval, "executions per interval");
    opts["price_scale"] = cmd->add_option("--price-scale", price_scale, "raw price multiplier");
    opts["carry_overnight"] =
        cmd->add_flag("--carry-overnight", carry_overnight, "use prior-day close across days");
    opts["thetas"] = cmd->add_option("--thetas", thetas, "imbalance filters");
    opts["ms"] = cmd->add_option("--ms", ms, "predictor warm-up interval counts");
    opts["k_max"] = cmd->add_option("--k-max", k_max, "max horizon for curves");
    opts["seed"] = cmd->add_option("--seed", seed, "RNG seed");
  }

  bool passed(const std::string& key) const {
    const auto it = opts.find(key);
    return it != opts.end() && it->second != nullptr && it->second->count() > 0;
  }

  RunConfig resolve() const {
    RunConfig c = passed("preset") ? preset_config(preset) : RunConfig{};
    if (passed("model")) c.model = model_kind_from_string(model);
    if (passed("cp_prob")) c.cp_prob = cp_prob;
    if (passed("mu0")) c.mu0 = mu0;
    if (passed("sigma0_sq")) c.sigma0_sq = sigma0_sq;
    if (passed("sigma_sq")) c.sigma_sq = sigma_sq;
    if (passed("rho")) c.rho = rho;
    if (passed("rho_sweep")) c.rho_sweep = rho_sweep;
    if (passed("rho_init")) c.rho_init = rho_init;
    if (passed("sigma_init_sq")) c.sigma_init_sq = sigma_init_sq;
    if (passed("omega0")) c.omega0 = omega0;
    if (passed("alpha0")) c.alpha0 = alpha0;
    if (passed("beta0")) c.beta0 = beta0;
    if (passed("sigma_sq0")) c.sigma_sq0 = sigma_sq0;
    if (passed("eta")) c.eta = eta;
    if (passed("max_evals")) c.max_evals = max_evals;
    if (passed("refine_evals")) c.refine_evals = refine_evals;
    if (passed("warm_start")) c.warm_start = warm_start;
    if (passed("trunc_threshold")) c.trunc_threshold = trunc_threshold;
    if (passed("trunc_cap")) c.trunc_cap = trunc_cap;
    if (passed("exec")) c.exec = exec;
    if (passed("mean_mode")) c.mean_mode = mean_mode;
    if (passed("n_per_interval")) c.n_per_interval = n_per_interval;
    if (passed("price_scale")) c.price_scale = price_scale;
    if (passed("carry_overnight")) c.carry_overnight = carry_overnight;
    if (passed("thetas")) c.thetas = thetas;
    if (passed("ms")) c.ms = ms;
    if (passed("k_max")) c.k_max = k_max;
    if (passed("seed")) c.seed = seed;
    if (passed("config")) c = apply_config_json(c, config_file);
    c.validate();
    return c;
  }
};

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& config,
                    const json& extra) {
  json j = json::parse(config_to_json(config));
  j["command"] = command;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream f(dir / "manifest.json");
  f << j.dump(2) << "\n";
}

std::vector<Regime> regimes_from_cp_times(const std::vector<std::int64_t>& cp_times,
                                          std::size_t t_len) {
  std::vector<std::int64_t> starts;
  if (cp_times.empty() || cp_times.front() != 1) starts.push_back(1);
  starts.insert(starts.end(), cp_times.begin(), cp_times.end());
  std::vector<Regime> regimes;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto begin = static_cast<std::size_t>(starts[i] - 1);
    const auto end =
        i + 1 < starts.size() ? static_cast<std::size_t>(starts[i + 1] - 1) : t_len;
    if (end > begin) regimes.push_back({begin, end, i + 1 == starts.size()});
  }
  return regimes;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string out;
  std::int64_t t_len = 5000;
  double hazard = 1.0 / 80.0;
  double mu0 = 0.0, sigma0_sq = 10.0, sigma_sq = 1.0;
  std::string rho_mode = "const";
  double rho = 0.0, omega = 0.02, alpha = 0.05, beta = 0.9;
  double rho_start = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  bool no_prices = false;
  double impact_a_bp = 1.0, impact_gamma = 0.5, impact_noise_bp = 0.5;
};

int cmd_simulate(const SimulateArgs& args) {
  SyntheticSpec spec;
  spec.hazard_prob = args.hazard;
  spec.mu0 = args.mu0;
  spec.sigma0_sq = args.sigma0_sq;
  spec.sigma_sq = args.sigma_sq;
  if (args.rho_mode == "const") {
    spec.rho_mode = SyntheticSpec::RhoMode::Constant;
    spec.rho = args.rho;
  } else if (args.rho_mode == "sd") {
    spec.rho_mode = SyntheticSpec::RhoMode::ScoreDriven;
    spec.omega = args.omega;
    spec.alpha = args.alpha;
    spec.beta = args.beta;
    if (!std::isnan(args.rho_start)) spec.rho_start = args.rho_start;
  } else {
    throw ConfigError("--rho-mode must be const|sd");
  }
  spec.length = args.t_len;
  spec.seed = args.seed;

  const SyntheticOutput sim = simulate(spec);
  FlowSeries series;
  series.x = sim.x;
  if (args.no_prices) {
    series.logp.assign(series.x.size(), 0.0);
  } else {
    const auto regimes = regimes_from_cp_times(sim.true_cp_times, sim.x.size());
    PriceImpactSpec pspec;
    pspec.a_bp = args.impact_a_bp;
    pspec.gamma = args.impact_gamma;
    pspec.noise_bp = args.impact_noise_bp;
    pspec.seed = args.seed + 0x9e3779b97f4a7c15ull;
    series.logp = synthesize_prices(series.x, regimes, pspec);
  }

  const fs::path dir = ensure_out_dir(args.out);
  write_flow_csv(dir / "flow.csv", series, &sim.true_cp_times);
  write_truth_json(dir / "truth.json", sim);

  json extra;
  extra["T"] = args.t_len;
  extra["hazard"] = args.hazard;
  extra["rho_mode"] = args.rho_mode;
  extra["synthetic_mu0"] = args.mu0;
  extra["synthetic_sigma0_sq"] = args.sigma0_sq;
  extra["synthetic_sigma_sq"] = args.sigma_sq;
  extra["prices"] = !args.no_prices;
  extra["impact_a_bp"] = args.impact_a_bp;
  extra["impact_gamma"] = args.impact_gamma;
  extra["impact_noise_bp"] = args.impact_noise_bp;
  RunConfig cfg;
  cfg.seed = args.seed;
  write_manifest(dir, "simulate", cfg, extra);
  std::printf("simulate: wrote %s (T=%lld, %zu true change points)\n",
              (dir / "flow.csv").c_str(), static_cast<long long>(args.t_len),
              sim.true_cp_times.size());
  return 0;
}

// ---------------------------------------------------------------------------

struct AggregateArgs {
  ConfigBinder binder;
  std::vector<std::string> messages;
  std::string out;
};

int cmd_aggregate(const AggregateArgs& args) {
  const RunConfig cfg = args.binder.resolve();
  MessageConfig mc;
  mc.price_scale = cfg.price_scale;

  std::vector<std::vector<TradeRecord>> days;
  for (const auto& path : args.messages) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open message file: " + path);
    days.push_back(parse_messages(f, mc));
  }
  const FlowSeries series = aggregate_days(days, cfg.n_per_interval);

  const fs::path dir = ensure_out_dir(args.out);
  write_flow_csv(dir / "flow.csv", series);
  write_flow_meta(dir / "flow.csv", series, cfg.n_per_interval);
  json extra;
  extra["message_files"] = args.messages;
  extra["intervals"] = series.size();
  write_manifest(dir, "aggregate", cfg, extra);
  std::printf("aggregate: %zu day(s) -> %zu intervals at N=%lld\n", days.size(),
              series.size(), static_cast<long long>(cfg.n_per_interval));
  return 0;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  ConfigBinder binder;
  std::string input;
  std::string out;
  bool no_posterior = false;
};

int cmd_detect(const DetectArgs& args) {
  const RunConfig cfg = args.binder.resolve();
  const FlowFile flow = read_flow_csv(args.input);

  auto detector = make_detector(cfg);
  const DetectionOutput out = run_detection(*detector, flow.series.x, !args.no_posterior);

  const fs::path dir = ensure_out_dir(args.out);
  write_cp_times_json(dir / "cp_times.json", out.cp_times);
  write_pred_csv(dir / "pred.csv", out);
  if (!args.no_posterior) write_posterior_csv(dir / "posterior.csv", out);
  json extra;
  extra["input"] = args.input;
  extra["intervals"] = flow.series.size();
  extra["cp_count"] = out.cp_times.size();
  extra["log_evidence"] = out.log_evidence;
  write_manifest(dir, "detect", cfg, extra);
  std::printf("detect[%s]: %zu intervals, %zu change points, log evidence %.6g\n",
              to_string(cfg.model).c_str(), flow.series.size(), out.cp_times.size(),
              out.log_evidence);
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  ConfigBinder binder;
  std::string input;
  std::string out;
  std::string primary = "mboc";
};

struct ModelRun {
  std::string name;
  DetectionOutput output;
  double mse_raw = 0.0;
  double mse_normalized = 0.0;
};

double series_variance(std::span<const double> x) {
  return variance_of(x);
}

void score_model(ModelRun& run, std::span<const double> x,
                 const std::vector<double>& forecasts) {
  std::vector<double> preds(forecasts.begin(), forecasts.end());
  std::vector<double> realized(x.begin(), x.end());
  run.mse_raw = mse(preds, realized);
  const double var = series_variance(x);
  run.mse_normalized = var > 0.0 ? run.mse_raw / var : run.mse_raw;
}

int cmd_evaluate(const EvaluateArgs& args) {
  const RunConfig cfg = args.binder.resolve();
  const FlowFile flow = read_flow_csv(args.input);
  const auto& x = flow.series.x;
  if (x.size() < 50) throw ConfigError("evaluate: need at least 50 intervals");

  struct Job {
    std::string name;
    ModelKind kind;
    std::optional<double> rho;
  };
  std::vector<Job> jobs = {{"bocpd", ModelKind::Bocpd, {}}};
  for (double r : cfg.rho_sweep) {
    char label[48];
    std::snprintf(label, sizeof(label), "mbo_rho%g", r);
    jobs.push_back({label, ModelKind::Mbo, r});
  }
  jobs.push_back({"mboc", ModelKind::Mboc, {}});

  std::vector<ModelRun> runs(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(jobs.size()); ++i) {
    auto detector = make_detector(cfg, jobs[i].kind, jobs[i].rho);
    runs[i].name = jobs[i].name;
    runs[i].output = run_detection(*detector, x);
    score_model(runs[i], x, runs[i].output.one_step_forecasts());
  }

  ModelRun arma_run;
  arma_run.name = "arma11";
  const Arma11Forecasts arma = arma11_fit_forecast(x);
  score_model(arma_run, x, arma.forecasts);

  // regime diagnostics for the primary model
  const ModelKind primary_kind = model_kind_from_string(args.primary);
  const ModelRun* primary = nullptr;
  for (const auto& r : runs)
    if ((primary_kind == ModelKind::Mboc && r.name == "mboc") ||
        (primary_kind == ModelKind::Bocpd && r.name == "bocpd") ||
        (primary_kind == ModelKind::Mbo && r.name.rfind("mbo_rho", 0) == 0)) {
      primary = &r;
      if (primary_kind != ModelKind::Mbo) break;
      char want[48];
      std::snprintf(want, sizeof(want), "mbo_rho%g", cfg.rho);
      if (r.name == want) break;
    }
  if (!primary) throw ConfigError("evaluate: unknown primary model " + args.primary);

  const auto regimes = extract_regimes(primary->output.argmax_r);
  ResidualModel residual_model;
  residual_model.mu0 = cfg.mu0;
  residual_model.sigma0_sq = cfg.sigma0_sq;
  residual_model.sigma_sq = cfg.sigma_sq;
  switch (primary_kind) {
    case ModelKind::Bocpd:
      residual_model.kind = ResidualModel::Kind::Iid;
      break;
    case ModelKind::Mbo:
      residual_model.kind = ResidualModel::Kind::Ar1;
      residual_model.rho = cfg.rho;
      break;
    case ModelKind::Mboc:
      residual_model.kind = ResidualModel::Kind::TvAr1;
      residual_model.lambda = {cfg.omega0, cfg.alpha0, cfg.beta0, cfg.sigma_sq0};
      residual_model.rho_init = cfg.rho_init;
      residual_model.sigma_sq = cfg.sigma_init_sq;
      break;
  }
  const auto tests = regime_specification_tests(x, regimes, residual_model, 8);

  const fs::path dir = ensure_out_dir(args.out);
  write_regimes_csv(dir / "regimes.csv", flow.series, regimes, residual_model);
  write_histogram_csv(dir / "histogram.csv", regime_length_histogram(regimes));

  json report;
  report["intervals"] = x.size();
  report["sample_variance"] = series_variance(x);
  json models;
  for (const auto& r : runs) {
    models[r.name] = {{"mse", r.mse_raw}, {"mse_normalized", r.mse_normalized}};
  }
  models[arma_run.name] = {{"mse", arma_run.mse_raw},
                           {"mse_normalized", arma_run.mse_normalized},
                           {"phi", arma.fit.phi},
                           {"theta", arma.fit.theta},
                           {"c", arma.fit.c},
                           {"sigma_sq", arma.fit.sigma_sq}};
  report["models"] = models;
  report["primary_model"] = args.primary;
  report["regime_count"] = regimes.size();
  report["regime_tests"] = {{"tested", tests.tested},
                            {"excluded_short", tests.excluded},
                            {"jb_pass_rate", tests.jb_pass_rate},
                            {"jb_skipped", tests.jb_skipped},
                            {"lb_pass_rate", tests.lb_pass_rate},
                            {"lb_skipped", tests.lb_skipped}};
  {
    json hist = json::array();
    for (const auto& [len, count] : regime_length_histogram(regimes))
      hist.push_back({{"length", len}, {"count", count}});
    report["regime_length_histogram"] = hist;
  }
  std::ofstream rf(dir / "report.json");
  rf << report.dump(2) << "\n";

  json extra;
  extra["input"] = args.input;
  extra["primary_model"] = args.primary;
  write_manifest(dir, "evaluate", cfg, extra);

  std::printf("evaluate: %zu intervals\n", x.size());
  for (const auto& r : runs)
    std::printf("  %-12s mse=%.6g normalized=%.4f\n", r.name.c_str(), r.mse_raw,
                r.mse_normalized);
  std::printf("  %-12s mse=%.6g normalized=%.4f\n", arma_run.name.c_str(), arma_run.mse_raw,
              arma_run.mse_normalized);
  std::printf("  regimes=%zu jb_pass=%.3f lb_pass=%.3f\n", regimes.size(),
              tests.jb_pass_rate, tests.lb_pass_rate);
  return 0;
}

// ---------------------------------------------------------------------------

struct ImpactArgs {
  ConfigBinder binder;
  std::string input;
  std::string out;
  std::string detect_dir;
};

int cmd_impact(const ImpactArgs& args) {
  const RunConfig cfg = args.binder.resolve();
  const FlowFile flow = read_flow_csv(args.input);
  const auto& series = flow.series;

  bool any_price = false;
  for (double p : series.logp) any_price = any_price || p != 0.0;
  if (!any_price)
    throw ConfigError(
        "impact: the input has no log-price column content (all zero); provide prices "
        "(aggregate from messages, or simulate without --no-prices)");

  DetectionOutput detection;
  if (!args.detect_dir.empty()) {
    detection = read_pred_csv(fs::path(args.detect_dir) / "pred.csv");
    if (detection.argmax_r.size() != series.size())
      throw ConfigError("impact: detection output length does not match the input series");
  } else {
    auto detector = make_detector(cfg);
    detection = run_detection(*detector, series.x);
  }

  const auto regimes = extract_regimes(detection.argmax_r);
  const fs::path dir = ensure_out_dir(args.out);

  // Theta-filtered price paths inside regimes
  for (double theta : cfg.thetas) {
    const ImpactCurve curve = impact_curve(series, regimes, theta, cfg.k_max,
                                           cfg.carry_overnight);
    char name[64];
    std::snprintf(name, sizeof(name), "impact_theta%g.csv", theta);
    write_impact_csv(dir / name, curve);
  }

  // Power-law regression of regime price change on net regime volume
  json powerlaw;
  {
    json per_theta = json::array();
    for (double theta : cfg.thetas) {
      std::vector<double> q, y;
      for (const Regime& r : regimes) {
        const RegimeImbalance imb = regime_imbalance(series.x, r);
        if (imb.sign == 0 || !(imb.z > theta)) continue;
        // total regime price change, anchored like the impact curve at the
        // price preceding the regime; regimes without one are skipped
        const std::ptrdiff_t prev = series.prev_price_index(r.begin, cfg.carry_overnight);
        if (prev < 0) continue;
        KahanSum net;
        for (std::size_t t = r.begin; t < r.end; ++t) net.add(series.x[t]);
        const double dp =
            series.logp[r.end - 1] - series.logp[static_cast<std::size_t>(prev)];
        q.push_back(double(imb.sign) * net.value());
        y.push_back(double(imb.sign) * dp * kBasisPoints);
      }
      json entry;
      entry["theta"] = theta;
      entry["n_regimes"] = q.size();
      for (bool remove : {false, true}) {
        json fit_json;
        if (q.size() >= 3) {
          const PowerLawFit fit = fit_power_law(q, y, remove);
          fit_json = {{"A", fit.a},           {"se_A", fit.se_a},
                      {"gamma", fit.gamma},   {"se_gamma", fit.se_gamma},
                      {"n_used", fit.n_used}, {"n_outliers", fit.n_outliers}};
        } else {
          fit_json = {{"error", "fewer than 3 qualifying regimes"}};
        }
        entry[remove ? "outliers_removed" : "full_sample"] = fit_json;
      }
      per_theta.push_back(entry);
    }
    powerlaw["units"] = "A maps shares^gamma to basis points";
    powerlaw["fits"] = per_theta;
    std::ofstream pf(dir / "powerlaw.json");
    pf << powerlaw.dump(2) << "\n";
  }

  // Online flow and impact predictors with unconditional benchmarks
  for (int m : cfg.ms) {
    const auto cond_flow = online_flow_predictor(series.x, detection.cp_times, m, cfg.k_max);
    const auto unc_flow = unconditional_flow_predictor(series.x, m, cfg.k_max);
    write_predictor_csv(dir / ("predictor_flow_m" + std::to_string(m) + ".csv"), cond_flow,
                        unc_flow);

    const auto cond_imp = online_impact_predictor(series, detection.cp_times, m, cfg.k_max);
    const auto unc_imp = unconditional_impact_predictor(series, m, cfg.k_max);
    write_predictor_csv(dir / ("predictor_impact_m" + std::to_string(m) + ".csv"), cond_imp,
                        unc_imp);
  }

  json extra;
  extra["input"] = args.input;
  extra["detect_dir"] = args.detect_dir;
  extra["regime_count"] = regimes.size();
  write_manifest(dir, "impact", cfg, extra);
  std::printf("impact: %zu regimes, thetas x %zu, m x %zu -> %s\n", regimes.size(),
              cfg.thetas.size(), cfg.ms.size(), dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-flow regime detection and market-impact analysis"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "generate synthetic flow with known truth");
  sim->add_option("--out", sim_args.out, "output directory")->required();
  sim->add_option("--T", sim_args.t_len, "series length");
  sim->add_option("--hazard", sim_args.hazard, "per-interval break probability");
  sim->add_option("--mu0", sim_args.mu0, "prior mean of regime levels");
  sim->add_option("--sigma0-sq", sim_args.sigma0_sq, "prior variance of regime levels");
  sim->add_option("--sigma-sq", sim_args.sigma_sq, "within-regime variance");
  sim->add_option("--rho-mode", sim_args.rho_mode, "const|sd");
  sim->add_option("--rho", sim_args.rho, "constant correlation");
  sim->add_option("--omega", sim_args.omega, "score recursion level");
  sim->add_option("--alpha", sim_args.alpha, "score loading");
  sim->add_option("--beta", sim_args.beta, "score persistence");
  sim->add_option("--rho-start", sim_args.rho_start, "initial correlation per regime");
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_flag("--no-prices", sim_args.no_prices, "skip the synthetic price path");
  sim->add_option("--impact-a-bp", sim_args.impact_a_bp, "price impact amplitude (bp)");
  sim->add_option("--impact-gamma", sim_args.impact_gamma, "price impact exponent");
  sim->add_option("--impact-noise-bp", sim_args.impact_noise_bp, "price noise (bp)");

  AggregateArgs agg_args;
  auto* agg = app.add_subcommand("aggregate", "parse message files and aggregate flow");
  agg->add_option("--messages", agg_args.messages, "message CSV files, one per day")
      ->required()
      ->expected(-1);
  agg->add_option("--out", agg_args.out, "output directory")->required();
  agg_args.binder.attach(agg, false);

  DetectArgs det_args;
  auto* det = app.add_subcommand("detect", "run a detector over a flow series");
  det->add_option("--input", det_args.input, "flow.csv")->required();
  det->add_option("--out", det_args.out, "output directory")->required();
  det->add_flag("--no-posterior", det_args.no_posterior, "skip posterior.csv");
  det_args.binder.attach(det, true);

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "compare all models on one input");
  eval->add_option("--input", eval_args.input, "flow.csv")->required();
  eval->add_option("--out", eval_args.out, "output directory")->required();
  eval->add_option("--primary-model", eval_args.primary,
                   "model whose regimes feed the diagnostics");
  eval_args.binder.attach(eval, true);

  ImpactArgs imp_args;
  auto* imp = app.add_subcommand("impact", "impact curves, power law, online predictors");
  imp->add_option("--input", imp_args.input, "flow.csv")->required();
  imp->add_option("--out", imp_args.out, "output directory")->required();
  imp->add_option("--detect-dir", imp_args.detect_dir,
                  "reuse a prior detect run instead of detecting inline");
  imp_args.binder.attach(imp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (agg->parsed()) return cmd_aggregate(agg_args);
    if (det->parsed()) return cmd_detect(det_args);
    if (eval->parsed()) return cmd_evaluate(eval_args);
    if (imp->parsed()) return cmd_impact(imp_args);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
