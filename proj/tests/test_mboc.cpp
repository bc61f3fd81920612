#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "flowregime/detector.hpp"
#include "flowregime/mboc.hpp"
#include "flowregime/synthetic.hpp"

using namespace flowregime;

namespace {

std::vector<double> regime_data(std::uint64_t seed, std::int64_t t_len, bool score_driven) {
  SyntheticSpec spec;
  spec.hazard_prob = 0.02;
  spec.mu0 = 0.0;
  spec.sigma0_sq = 25.0;
  spec.sigma_sq = 1.0;
  if (score_driven) {
    spec.rho_mode = SyntheticSpec::RhoMode::ScoreDriven;
    spec.omega = 0.02;
    spec.alpha = 0.05;
    spec.beta = 0.9;
  } else {
    spec.rho = 0.2;
  }
  spec.length = t_len;
  spec.seed = seed;
  return simulate(spec).x;
}

MbocConfig unit_scale_config(double eta, double rho_init) {
  MbocConfig mc;
  mc.mu0 = 0.0;
  mc.sigma0_sq = 25.0;
  mc.sigma_init_sq = 1.0;
  mc.rho_init = rho_init;
  mc.lambda_init = {0.08, 0.02, 0.05, 1.0};
  mc.eta = eta;
  return mc;
}

void check_rows_equal(const std::vector<PosteriorCell>& a,
                      const std::vector<PosteriorCell>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].run_length == b[i].run_length);
    CHECK(std::fabs(a[i].prob - b[i].prob) <= tol);
  }
}

}  // namespace

TEST_CASE("eta of infinity freezes the correlation: mboc equals the ar1 filter at rho 0") {
  const auto x = regime_data(1, 1000, false);
  const Hazard hz(0.02);
  FilterOptions opt;

  MbocDetector mboc(unit_scale_config(1e18, 0.0), hz, opt);
  MboDetector mbo(Ar1Upm(0.0, 25.0, 1.0, 0.0), hz, opt);

  for (double v : x) {
    const auto so_mboc = mboc.step(v);
    const auto so_mbo = mbo.step(v);
    CHECK(std::fabs(so_mboc.mu_hat - so_mbo.mu_hat) <= 1e-10);
    CHECK(so_mboc.argmax_run_length == so_mbo.argmax_run_length);
    check_rows_equal(mboc.posterior_row(), mbo.posterior_row(), 1e-10);
  }
  CHECK(mboc.estimation_count() == 0);
}

TEST_CASE("reduction chain: mboc(eta=inf, rho_init=0) == mbo(rho=0) == bocpd") {
  const auto x = regime_data(2, 1000, false);
  const Hazard hz(0.0125);
  FilterOptions opt;

  MbocDetector mboc(unit_scale_config(1e18, 0.0), hz, opt);
  MboDetector mbo(Ar1Upm(0.0, 25.0, 1.0, 0.0), hz, opt);
  BocpdDetector bocpd(IidGaussianUpm(0.0, 25.0, 1.0), hz, opt);

  for (double v : x) {
    const auto a = mboc.step(v);
    const auto b = mbo.step(v);
    const auto c = bocpd.step(v);
    CHECK(std::fabs(a.mu_hat - b.mu_hat) <= 1e-10);
    CHECK(std::fabs(b.mu_hat - c.mu_hat) <= 1e-10);
    CHECK(std::fabs(a.sigma_paper - c.sigma_paper) <= 1e-10);
    check_rows_equal(mboc.posterior_row(), bocpd.posterior_row(), 1e-10);
  }
}

TEST_CASE("no estimation on the first step regardless of eta") {
  MbocConfig mc = unit_scale_config(1, 0.2);
  MbocDetector det(mc, Hazard(0.5), FilterOptions{});
  det.step(4.2);
  CHECK(det.estimation_count() == 0);
  CHECK(det.current_rho() == doctest::Approx(0.2));
}

TEST_CASE("estimation fires once the most likely window exceeds eta") {
  MbocConfig mc = unit_scale_config(3, 0.2);
  MbocDetector det(mc, Hazard(0.001), FilterOptions{});
  // steady data keeps the argmax on the growing window
  const std::vector<double> x = {1.0, 1.1, 0.9, 1.05, 0.95, 1.0, 1.02};
  std::size_t first_estimate_t = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    det.step(x[i]);
    if (first_estimate_t == 0 && det.estimation_count() > 0) first_estimate_t = i + 1;
  }
  // window length = argmax+1 must exceed eta=3, reachable at t=4 earliest
  CHECK(first_estimate_t == 4);
  CHECK(det.estimation_count() > 0);
}

TEST_CASE("the posterior at step t uses the correlation filtered at step t-1") {
  const auto x = regime_data(5, 60, true);
  MbocConfig mc = unit_scale_config(4, 0.2);
  MbocDetector det(mc, Hazard(0.01), FilterOptions{});

  // shadow filter whose rho we manage by hand, one step behind the detector's
  RunLengthFilter<TvAr1Upm> shadow(TvAr1Upm(0.0, 25.0, 1.0, 0.2), Hazard(0.01),
                                   FilterOptions{});
  double rho_prev = det.current_rho();
  double sigma_prev = 1.0;
  bool saw_rho_change = false;
  for (double v : x) {
    shadow.model().set_rho(rho_prev);
    shadow.model().set_sigma_sq(sigma_prev);
    shadow.step(v);
    det.step(v);
    check_rows_equal(det.posterior_row(), shadow.posterior_row(), 1e-12);
    if (det.current_rho() != rho_prev) saw_rho_change = true;
    rho_prev = det.current_rho();
    sigma_prev = det.current_params().sigma_sq;
  }
  CHECK(saw_rho_change);  // the lag assertion is vacuous if rho never moves
}

TEST_CASE("warm-started refinement keeps the likelihood path sane") {
  const auto x = regime_data(8, 400, true);
  MbocConfig mc = unit_scale_config(10, 0.2);
  mc.warm_start = true;
  mc.refine_evals = 30;
  MbocDetector det(mc, Hazard(0.02), FilterOptions{});
  for (double v : x) det.step(v);
  CHECK(det.estimation_count() > 10);
  CHECK(std::isfinite(det.log_evidence()));
  CHECK(std::fabs(det.current_rho()) <= 1.0);
  CHECK(det.current_params().sigma_sq > 0.0);
}

TEST_CASE("mboc rejects invalid configuration") {
  MbocConfig mc = unit_scale_config(0.5, 0.2);
  CHECK_THROWS_AS(MbocDetector(mc, Hazard(0.5), FilterOptions{}), ConfigError);
  MbocConfig mc2 = unit_scale_config(5, 0.2);
  mc2.sigma_init_sq = 0.0;
  CHECK_THROWS_AS(MbocDetector(mc2, Hazard(0.5), FilterOptions{}), ConfigError);
}

TEST_CASE("posterior rows from mboc remain normalized") {
  const auto x = regime_data(13, 500, true);
  MbocDetector det(unit_scale_config(8, 0.2), Hazard(0.02), FilterOptions{});
  for (double v : x) {
    det.step(v);
    double sum = 0.0;
    for (const auto& cell : det.posterior_row()) sum += cell.prob;
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}
