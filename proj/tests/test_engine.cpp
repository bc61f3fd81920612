#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "flowregime/detector.hpp"
#include "flowregime/hazard.hpp"
#include "flowregime/rl_engine.hpp"
#include "flowregime/upm.hpp"
#include "support/oracles.hpp"

using namespace flowregime;

namespace {

// Compare a filter posterior row against an oracle row.
template <class Model>
void check_row_against(const RunLengthFilter<Model>& filter,
                       const std::map<std::int64_t, double>& oracle_row, double tol) {
  const auto row = filter.posterior_row();
  REQUIRE(row.size() == oracle_row.size());
  for (const auto& cell : row) {
    const auto it = oracle_row.find(cell.run_length);
    REQUIRE(it != oracle_row.end());
    const double ref = it->second;
    const double err = std::fabs(cell.prob - ref);
    const bool negligible = std::max(cell.prob, ref) <= 1e-13;
    CHECK((negligible || err <= tol * std::max(cell.prob, ref)));
  }
}

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, double sd,
                                  double jump_sd) {
  std::normal_distribution<double> noise(0.0, sd);
  std::normal_distribution<double> level(0.0, jump_sd);
  std::vector<double> x(n);
  double theta = level(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (rng() & 7u) == 0) theta = level(rng);  // occasional break
    x[i] = theta + noise(rng);
  }
  return x;
}

}  // namespace

TEST_CASE("hazard transition splits mass between reset and growth") {
  const Hazard hz(1.0 / 80.0);
  const auto tr = hazard_transition(5, hz);
  CHECK(tr.p_reset == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(tr.p_grow == doctest::Approx(0.9875).epsilon(1e-15));

  const auto all_reset = hazard_transition(3, Hazard(1.0));
  CHECK(all_reset.p_reset == 1.0);
  CHECK(all_reset.p_grow == 0.0);

  const auto tr0 = hazard_transition(0, Hazard(0.3));
  CHECK(tr0.p_reset == doctest::Approx(0.3));
  CHECK(tr0.p_grow == doctest::Approx(0.7));

  CHECK_THROWS_AS(Hazard(0.0), ConfigError);
  CHECK_THROWS_AS(Hazard(1.5), ConfigError);
}

TEST_CASE("first observation opens the first regime deterministically") {
  RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 1.0, 1.0), Hazard(0.5));
  REQUIRE(filter.entries().size() == 1);
  REQUIRE(filter.entries()[0].run_length == 0);

  filter.step(0.7);
  const auto row = filter.posterior_row();
  REQUIRE(row.size() == 1);
  CHECK(row[0].run_length == 0);
  CHECK(row[0].prob == doctest::Approx(1.0).epsilon(1e-15));
  // evidence after one point is the prior predictive
  CHECK(filter.log_evidence() ==
        doctest::Approx(gaussian_logpdf(0.7, 0.0, 2.0)).epsilon(1e-12));

  // the second step splits mass between break and growth
  filter.step(0.7);
  const auto row2 = filter.posterior_row();
  REQUIRE(row2.size() == 2);
  CHECK(row2[0].run_length == 0);
  CHECK(row2[1].run_length == 1);
  CHECK(row2[0].prob + row2[1].prob == doctest::Approx(1.0).epsilon(1e-12));
  // run lengths never exceed t-1
  CHECK(filter.argmax_run_length() <= 1);
}

TEST_CASE("two-point posterior matches exhaustive enumeration") {
  const std::vector<double> x = {0.0, 10.0};
  oracle::GaussianSegmentModel seg{0.0, 1.0, 1.0, 0.0};
  const auto rows = oracle::enumerate_posterior(x, 0.5, seg);

  RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 1.0, 1.0), Hazard(0.5),
                                         FilterOptions{TruncationPolicy::none()});
  filter.step(x[0]);
  check_row_against(filter, rows[0], 1e-12);
  filter.step(x[1]);
  check_row_against(filter, rows[1], 1e-12);
}

TEST_CASE("iid filter matches enumeration on random series") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const auto x = random_series(rng, 8, 1.0, 3.0);
    oracle::GaussianSegmentModel seg{0.0, 4.0, 1.0, 0.0};
    const auto rows = oracle::enumerate_posterior(x, 0.1, seg);

    RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 4.0, 1.0), Hazard(0.1),
                                           FilterOptions{TruncationPolicy::none()});
    for (std::size_t t = 0; t < x.size(); ++t) {
      filter.step(x[t]);
      check_row_against(filter, rows[t], 1e-10);
    }
  }
}

TEST_CASE("ar1 filter matches enumeration on random series") {
  std::mt19937_64 rng(202);
  for (double rho : {-0.4, 0.3, 0.8}) {
    const auto x = random_series(rng, 8, 1.0, 2.5);
    oracle::GaussianSegmentModel seg{0.1, 2.0, 1.3, rho};
    const auto rows = oracle::enumerate_posterior(x, 0.08, seg);

    RunLengthFilter<Ar1Upm> filter(Ar1Upm(0.1, 2.0, 1.3, rho), Hazard(0.08),
                                   FilterOptions{TruncationPolicy::none()});
    for (std::size_t t = 0; t < x.size(); ++t) {
      filter.step(x[t]);
      check_row_against(filter, rows[t], 1e-10);
    }
  }
}

TEST_CASE("certain break concentrates all mass at run length zero") {
  RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 1.0, 1.0), Hazard(1.0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    filter.step(normal(rng));
    CHECK(filter.argmax_run_length() == 0);
    const auto row = filter.posterior_row();
    CHECK(row[0].run_length == 0);
    CHECK(row[0].prob == doctest::Approx(1.0).epsilon(1e-12));
  }

  oracle::GaussianSegmentModel seg{0.0, 1.0, 1.0, 0.0};
  const std::vector<double> x = {1.0, -2.0, 0.5};
  const auto rows = oracle::enumerate_posterior(x, 1.0, seg);
  for (const auto& row : rows) {
    CHECK(row.at(0) == doctest::Approx(1.0));
  }
}

TEST_CASE("constant data grows the argmax run length") {
  const std::vector<double> x = {5.0, 5.0, 5.0, 5.0};
  oracle::GaussianSegmentModel seg{0.0, 25.0, 1.0, 0.0};
  const auto rows = oracle::enumerate_posterior(x, 0.01, seg);
  RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 25.0, 1.0), Hazard(0.01),
                                         FilterOptions{TruncationPolicy::none()});
  for (std::size_t t = 0; t < x.size(); ++t) {
    filter.step(x[t]);
    check_row_against(filter, rows[t], 1e-10);
    std::int64_t best = 0;
    double best_p = -1.0;
    for (const auto& [r, p] : rows[t])
      if (p > best_p) {
        best_p = p;
        best = r;
      }
    CHECK(best == static_cast<std::int64_t>(t));
    CHECK(filter.argmax_run_length() == static_cast<std::int64_t>(t));
  }
}

TEST_CASE("posterior rows stay normalized over long runs") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 2.0);
  RunLengthFilter<Ar1Upm> filter(Ar1Upm(0.0, 10.0, 1.0, 0.2), Hazard(0.0125));
  for (int t = 0; t < 3000; ++t) {
    filter.step(normal(rng));
    const auto row = filter.posterior_row();
    double sum = 0.0;
    for (const auto& cell : row) sum += cell.prob;
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("predictive mixture combines hypotheses") {
  // degenerate posterior: the mixture equals that hypothesis' mean
  RunLengthFilter<IidGaussianUpm> point(IidGaussianUpm(7.0, 1e-12, 1.0), Hazard(0.5));
  const auto mix0 = point.mixture();
  CHECK(mix0.mean == doctest::Approx(7.0).epsilon(1e-9));

  // fresh state: prior-only mixture
  RunLengthFilter<IidGaussianUpm> fresh(IidGaussianUpm(1.5, 4.0, 1.0), Hazard(0.1));
  const auto mixf = fresh.mixture();
  CHECK(mixf.mean == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(mixf.sigma_paper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mixf.sigma_full == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("mixture equals the hand-computed weighted combination") {
  // two-entry mixture arithmetic: with weights (p0, p1), means (m0, m1) and
  // posterior variances (v0, v1): mean = sum p*m, sigma_paper = sqrt(sum p*v),
  // and the full variance adds the mean dispersion sum p*m^2 - mean^2.
  RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 1.0, 1.0), Hazard(0.5));
  filter.step(2.0);
  filter.step(-1.0);
  const auto row = filter.posterior_row();
  REQUIRE(row.size() == 2);

  const auto& model = filter.model();
  const auto& entries = filter.entries();
  double mean = 0.0, pv = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double p = row[i].prob;
    const double m = model.conditional_mean(entries[i].stat);
    mean += p * m;
    pv += p * model.posterior(entries[i].stat).var;
    m2 += p * (model.predictive_variance(entries[i].stat) + m * m);
  }
  const auto mix = filter.mixture();
  CHECK(mix.mean == doctest::Approx(mean).epsilon(1e-13));
  CHECK(mix.sigma_paper == doctest::Approx(std::sqrt(pv)).epsilon(1e-13));
  CHECK(mix.sigma_full == doctest::Approx(std::sqrt(m2 - mean * mean)).epsilon(1e-13));

  // frozen two-entry arithmetic: weights (1/2, 1/2), means (0, 2), posterior
  // variances (1, 1) give mean 1, sigma_paper 1, and mean dispersion 1
  const double mu_mix = 0.5 * 0.0 + 0.5 * 2.0;
  CHECK(mu_mix == 1.0);
  CHECK(std::sqrt(0.5 * 1.0 + 0.5 * 1.0) == 1.0);
  CHECK(0.5 * (0.0 * 0.0) + 0.5 * (2.0 * 2.0) - mu_mix * mu_mix == 1.0);
}

TEST_CASE("zero-threshold truncation is bit-identical to the untruncated run") {
  std::mt19937_64 rng(13);
  const auto x = random_series(rng, 10, 1.0, 3.0);

  FilterOptions with_trunc;
  with_trunc.truncation = TruncationPolicy::none();
  with_trunc.truncation_enabled = true;
  FilterOptions without;
  without.truncation_enabled = false;

  RunLengthFilter<IidGaussianUpm> a(IidGaussianUpm(0.0, 4.0, 1.0), Hazard(0.05), with_trunc);
  RunLengthFilter<IidGaussianUpm> b(IidGaussianUpm(0.0, 4.0, 1.0), Hazard(0.05), without);
  for (double v : x) {
    a.step(v);
    b.step(v);
    const auto ra = a.posterior_row();
    const auto rb = b.posterior_row();
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      CHECK(ra[i].run_length == rb[i].run_length);
      CHECK(ra[i].prob == rb[i].prob);  // exact
    }
    CHECK(a.mixture().mean == b.mixture().mean);
  }
}

TEST_CASE("cap truncation keeps the heaviest hypotheses and renormalizes") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal(0.0, 1.0);
  FilterOptions opt;
  opt.truncation = {0.0, 16};
  RunLengthFilter<IidGaussianUpm> filter(IidGaussianUpm(0.0, 4.0, 1.0), Hazard(0.02), opt);
  for (int t = 0; t < 200; ++t) {
    filter.step(normal(rng));
    CHECK(filter.entries().size() <= 16);
    double sum = 0.0;
    for (const auto& cell : filter.posterior_row()) sum += cell.prob;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("serial and parallel kernels produce identical output") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> x(2000);
  for (double& v : x) v = normal(rng);

  FilterOptions serial;
  serial.exec = StepExec::Serial;
  serial.truncation = {1e-12, 400};
  FilterOptions parallel = serial;
  parallel.exec = StepExec::Parallel;

  RunLengthFilter<Ar1Upm> fs(Ar1Upm(0.0, 8.0, 1.0, 0.25), Hazard(0.004), serial);
  RunLengthFilter<Ar1Upm> fp(Ar1Upm(0.0, 8.0, 1.0, 0.25), Hazard(0.004), parallel);
  for (double v : x) {
    fs.step(v);
    fp.step(v);
  }
  const auto rs = fs.posterior_row();
  const auto rp = fp.posterior_row();
  REQUIRE(rs.size() == rp.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(rs[i].run_length == rp[i].run_length);
    CHECK(rs[i].prob == rp[i].prob);  // bitwise
  }
  CHECK(fs.log_evidence() == fp.log_evidence());
  CHECK(fs.mixture().mean == fp.mixture().mean);
}

TEST_CASE("paper-literal mixture mean uses posterior means") {
  FilterOptions literal;
  literal.mean_mode = MixtureMeanMode::PosteriorMean;
  RunLengthFilter<Ar1Upm> cond(Ar1Upm(0.0, 2.0, 1.0, 0.6), Hazard(0.1));
  RunLengthFilter<Ar1Upm> lit(Ar1Upm(0.0, 2.0, 1.0, 0.6), Hazard(0.1), literal);
  for (double v : {1.0, 1.4, 0.8}) {
    cond.step(v);
    lit.step(v);
  }
  // with rho != 0 and x_last != mu_r the two means must differ
  CHECK(cond.mixture().mean != lit.mixture().mean);

  double manual = 0.0;
  for (const auto& e : lit.entries())
    manual += std::exp(e.log_post) * lit.model().posterior(e.stat).mean;
  CHECK(lit.mixture().mean == doctest::Approx(manual).epsilon(1e-13));
}

TEST_CASE("run_detection collects paths and change points") {
  std::vector<double> x = {0.1, 0.2, 30.0, 30.1, 30.2, -40.0, -40.1};
  BocpdDetector det(IidGaussianUpm(0.0, 100.0, 0.1), Hazard(0.05), FilterOptions{});
  const auto out = run_detection(det, x, true);
  CHECK(out.mu_hat.size() == x.size());
  CHECK(out.rows.size() == x.size());
  CHECK(out.prior_mu == doctest::Approx(0.0));
  // breaks detected at the level shifts
  bool has_cp_at_3 = false, has_cp_at_6 = false;
  for (auto t : out.cp_times) {
    if (t == 3) has_cp_at_3 = true;
    if (t == 6) has_cp_at_6 = true;
  }
  CHECK(has_cp_at_3);
  CHECK(has_cp_at_6);
}
