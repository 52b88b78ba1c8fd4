#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fracskellam/processes.hpp"
#include "fracskellam/validation.hpp"

using namespace fracskellam;

TEST_CASE("empirical_pmf tabulates exactly") {
  const EmpiricalPmf a = empirical_pmf({0, 0, 0});
  CHECK(a.n == 3);
  CHECK(a.prob(0) == 1.0);
  CHECK(a.prob(1) == 0.0);

  const EmpiricalPmf b = empirical_pmf({1, -1});
  CHECK(b.prob(1) == 0.5);
  CHECK(b.prob(-1) == 0.5);
  double total = 0.0;
  for (const auto& [k, v] : b.table()) total += v;
  CHECK(total == 1.0);
}

TEST_CASE("total_variation basics") {
  std::map<long long, double> p{{0, 1.0}};
  CHECK(total_variation(p, p) == 0.0);
  std::map<long long, double> q{{1, 1.0}};
  CHECK(total_variation(p, q) == 1.0);
  std::map<long long, double> r{{0, 0.5}, {1, 0.5}};
  CHECK(total_variation(p, r) == doctest::Approx(0.5));
}

TEST_CASE("config parsing with diagnostics") {
  std::istringstream good(
      "seed = 7\n"
      "threads = 2\n"
      "# comment\n"
      "[check degeneracy]\n"
      "threshold = 1e-10\n");
  const ExperimentConfig cfg = ExperimentConfig::parse(good);
  CHECK(cfg.seed == 7);
  CHECK(cfg.threads == 2);
  REQUIRE(cfg.checks.size() == 1);
  CHECK(cfg.checks[0].name == "degeneracy");
  CHECK(cfg.checks[0].params.at("threshold") == "1e-10");

  std::istringstream bad_section("[bogus]\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(bad_section), ConfigError);

  std::istringstream bad_key("wibble = 1\n");
  try {
    ExperimentConfig::parse(bad_key);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
  }

  std::istringstream bad_value("[check degeneracy]\nnot a kv pair\n");
  try {
    ExperimentConfig::parse(bad_value);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("run_experiment rejects unknown checks with the line number") {
  std::istringstream in("[check nonsense]\n");
  const ExperimentConfig cfg = ExperimentConfig::parse(in);
  try {
    run_experiment(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("nonsense") != std::string::npos);
  }
}

TEST_CASE("run_experiment on an empty check list is empty") {
  std::istringstream in("seed = 3\n");
  CHECK(run_experiment(ExperimentConfig::parse(in)).empty());
}

TEST_CASE("deterministic reports for a fixed seed") {
  std::istringstream in(
      "seed = 11\n"
      "[check pmf_agreement]\n"
      "family = skellam\n"
      "alpha = 1\n"
      "beta = 1\n"
      "lambda = 1\n"
      "mu = 1\n"
      "t = 1\n"
      "n = 20000\n");
  const ExperimentConfig cfg = ExperimentConfig::parse(in);
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.size() == 1);
  CHECK(report_json(a[0]) == report_json(b[0]));
  CHECK(a[0].pass);
}

TEST_CASE("pmf agreement detects a deliberately wrong null") {
  std::istringstream in(
      "seed = 12\n"
      "[check pmf_agreement]\n"
      "family = skellam\n"
      "alpha = 1\n"
      "beta = 1\n"
      "lambda = 1\n"
      "mu = 1\n"
      "t = 1\n"
      "n = 100000\n"
      "scale_rates = 1.2\n");
  const auto reports = run_experiment(ExperimentConfig::parse(in));
  REQUIRE(reports.size() == 1);
  CHECK_FALSE(reports[0].pass);
}

TEST_CASE("martingale drift check passes for TSFPP and TGSFSP") {
  // Counting case (TSFPP): lambda = 2, beta = 0.5, theta = 1.
  auto tsfpp = ProcessSpec::counting(1, 0.5, {2.0}, 1.0);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.1);
  const ValidationReport r1 = martingale_drift_check(tsfpp, g, 30000, 42);
  CHECK(r1.pass);

  auto tgsfsp = ProcessSpec::skellam(1, 0.5, {1.0, 2.0}, {2.0, 1.0}, 1.0);
  const ValidationReport r2 = martingale_drift_check(tgsfsp, g, 30000, 43);
  CHECK(r2.pass);

  auto untempered = ProcessSpec::skellam(1, 0.5, {1.0}, {1.0});
  CHECK_THROWS_AS(martingale_drift_check(untempered, g, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("classical limit: S(t)/t concentrates on the rate difference") {
  // alpha = beta = 1: the law of large numbers, spread ~ t^{-1/2}.
  auto spec = ProcessSpec::skellam(1, 1, {2.0}, {1.0});
  auto spread_at = [&](double t, std::uint64_t stream) {
    RngStream rng(99, stream);
    double sum = 0.0, sum2 = 0.0;
    const std::size_t n = 4000;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = double(process_endpoint(spec, t, rng)) / t;
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    CHECK(std::fabs(mean - 1.0) < 0.1);  // drift = lambda - mu
    return std::sqrt(std::max(sum2 / n - mean * mean, 0.0));
  };
  const double s100 = spread_at(100.0, 0);
  const double s400 = spread_at(400.0, 1);
  CHECK(s400 < s100);
  CHECK(s400 == doctest::Approx(0.5 * s100).epsilon(0.25));
}

TEST_CASE("limit distribution check at moderate scale") {
  auto spec = ProcessSpec::skellam(0.6, 0.8, {2.0}, {1.0});
  const ValidationReport r = limit_distribution_check(spec, 200.0, 4000, 7, 0.05);
  CHECK(r.pass);

  auto degenerate = ProcessSpec::skellam(0.6, 0.8, {1.0}, {1.0});
  CHECK_THROWS_AS(limit_distribution_check(degenerate, 200.0, 100, 7, 0.05),
                  std::invalid_argument);
}

TEST_CASE("report table formats one line per report") {
  ValidationReport r;
  r.check = "demo";
  r.label = "demo";
  r.statistic_name = "tv";
  r.statistic = 0.01;
  r.threshold = 0.02;
  r.pass = true;
  const std::string table = report_table({r});
  CHECK(table.find("demo") != std::string::npos);
  CHECK(table.find("PASS") != std::string::npos);
}
