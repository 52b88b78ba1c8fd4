#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracskellam/rng.hpp"
#include "fracskellam/special_functions.hpp"
#include "fracskellam/subordinators.hpp"

using namespace fracskellam;

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

template <typename F>
MeanSe mc_mean(std::size_t n, F draw) {
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw(i);
    sum += x;
    sum2 += x * x;
  }
  MeanSe r;
  r.mean = sum / n;
  r.se = std::sqrt(std::max(sum2 / n - r.mean * r.mean, 0.0) / n);
  return r;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("stable_increment is positive and reproducible") {
  RngStream r1(42, 7), r2(42, 7), r3(42, 8);
  std::vector<double> a, b, c;
  for (int i = 0; i < 200; ++i) {
    a.push_back(stable_increment(0.6, 0.5, r1));
    b.push_back(stable_increment(0.6, 0.5, r2));
    c.push_back(stable_increment(0.6, 0.5, r3));
  }
  CHECK(a == b);  // bit-identical for identical (seed, stream)
  CHECK(a != c);
  for (double x : a) CHECK(x > 0.0);
}

TEST_CASE("stable_increment Laplace transform E[e^{-X}] = e^{-h}") {
  for (double beta : {0.3, 0.5, 0.7}) {
    RngStream rng(1234, 0);
    const std::size_t n = 100000;
    const auto r = mc_mean(n, [&](std::size_t) {
      return std::exp(-stable_increment(beta, 1.0, rng));
    });
    CHECK(std::fabs(r.mean - std::exp(-1.0)) < 3.0 * r.se);
  }
}

TEST_CASE("stable_increment half-stable CDF matches erfc closed form") {
  // For beta = 1/2 the increment over h=1 is Levy with
  // P(X <= x) = erfc(1/(2 sqrt(x))).
  RngStream rng(99, 3);
  const std::size_t n = 100000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (stable_increment(0.5, 1.0, rng) <= 1.0) ++hits;
  const double p = double(hits) / n;
  const double want = std::erfc(0.5);
  const double se = std::sqrt(want * (1.0 - want) / n);
  CHECK(std::fabs(p - want) < 3.0 * se);
}

TEST_CASE("stable_path starts at zero and is strictly increasing") {
  RngStream rng(5, 0);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.01);
  const SubordinatorPath p = stable_path(0.7, g, rng);
  REQUIRE(p.values.size() == g.n_points);
  CHECK(p.values[0] == 0.0);
  for (std::size_t i = 1; i < p.values.size(); ++i)
    CHECK(p.values[i] > p.values[i - 1]);

  RngStream rng1(6, 0);
  const TimeGrid g1{0.01, 1};
  CHECK(stable_path(0.5, g1, rng1).values == std::vector<double>{0.0});
}

TEST_CASE("stable_path endpoint Laplace transform at beta=0.7") {
  RngStream rng(2024, 1);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.1);
  const std::size_t n = 100000;
  const auto r = mc_mean(n, [&](std::size_t) {
    return std::exp(-stable_path(0.7, g, rng).values.back());
  });
  CHECK(std::fabs(r.mean - std::exp(-1.0)) < 3.0 * r.se);
}

TEST_CASE("inverse_stable_path mean and variance at alpha=0.5") {
  RngStream rng(77, 0);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.5);
  const double res = 0.002;
  const std::size_t n = 40000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = inverse_stable_path(0.5, g, rng, res).values.back();
    sum += y;
    sum2 += y * y;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double want_mean = 1.0 / std::tgamma(1.5);
  const double want_var = 2.0 / std::tgamma(2.0) -
                          1.0 / (std::tgamma(1.5) * std::tgamma(1.5));
  const double se_mean = std::sqrt(var / n);
  // Hitting-time discretization biases upward by at most `res`.
  CHECK(std::fabs(mean - want_mean) < 3.0 * se_mean + res);
  CHECK(std::fabs(var - want_var) < 0.03);
}

TEST_CASE("inverse_stable_path is non-decreasing from zero") {
  RngStream rng(3, 2);
  const TimeGrid g = TimeGrid::from_step(2.0, 0.05);
  const SubordinatorPath p = inverse_stable_path(0.7, g, rng);
  CHECK(p.values[0] == 0.0);
  for (std::size_t i = 1; i < p.values.size(); ++i)
    CHECK(p.values[i] >= p.values[i - 1]);
}

TEST_CASE("inverse and forward stable paths sandwich the level") {
  // Reconstruct the internal D-walk with the same stream: the recorded
  // Y(t) = res*m must satisfy D(Y(t)) > t >= D(Y(t) - res).
  const double alpha = 0.6, res = 0.01;
  const TimeGrid g = TimeGrid::from_step(1.0, 0.25);
  RngStream rng(11, 4);
  const SubordinatorPath y = inverse_stable_path(alpha, g, rng, res);
  RngStream replay(11, 4);
  std::vector<double> d = {0.0};
  for (std::size_t i = 1; i < g.n_points; ++i) {
    const std::size_t m = static_cast<std::size_t>(y.values[i] / res + 0.5);
    while (d.size() <= m)
      d.push_back(d.back() + stable_increment(alpha, res, replay));
    const double t = g.time(i);
    CHECK(d[m] > t);
    if (m >= 1) CHECK(d[m - 1] <= t);
  }
}

TEST_CASE("tempered_stable_increment moments at beta=0.5, theta=1") {
  RngStream rng(314, 0);
  const std::size_t n = 50000;
  const double t = 2.0, h = 0.02;
  const std::size_t steps = static_cast<std::size_t>(t / h + 0.5);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0;
    for (std::size_t s = 0; s < steps; ++s)
      x += tempered_stable_increment(0.5, 1.0, h, rng);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // E = beta theta^{beta-1} t, V = beta(1-beta) theta^{beta-2} t.
  CHECK(std::fabs(mean - 1.0) < 3.0 * std::sqrt(var / n));
  CHECK(std::fabs(var - 0.5) < 0.02);
}

TEST_CASE("tempered increments approach plain stable as theta -> 0") {
  RngStream r1(17, 0), r2(17, 1);
  const std::size_t n = 10000;
  std::vector<double> tempered, plain;
  for (std::size_t i = 0; i < n; ++i) {
    tempered.push_back(tempered_stable_increment(0.5, 1e-6, 1.0, r1));
    plain.push_back(stable_increment(0.5, 1.0, r2));
  }
  CHECK(two_sample_ks(tempered, plain) < 0.02);
}

TEST_CASE("composed_time_change alpha=1 degenerates to the stable path") {
  RngStream r1(8, 0), r2(8, 1);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.05);
  std::vector<double> composed, direct;
  for (int i = 0; i < 4000; ++i) {
    composed.push_back(composed_time_change(1.0, 0.6, g, r1).values.back());
    direct.push_back(stable_path(0.6, g, r2).values.back());
  }
  CHECK(two_sample_ks(composed, direct) < 0.03);
}

TEST_CASE("composed_time_change subordination Laplace transform") {
  // E[e^{-D_beta(Y_alpha(1))}] = E_{alpha,1}(-1) across the index grid.
  const TimeGrid g = TimeGrid::from_step(1.0, 0.5);
  int stream = 0;
  for (double alpha : {0.3, 0.5, 0.7}) {
    for (double beta : {0.5, 0.7}) {
      RngStream rng(123, 5 + stream++);
      const std::size_t n = 30000;
      const auto r = mc_mean(n, [&](std::size_t) {
        return std::exp(
            -composed_time_change(alpha, beta, g, rng, 0.005).values.back());
      });
      const double want = mittag_leffler(alpha, 1.0, -1.0).value;
      CHECK(std::fabs(r.mean - want) < 3.0 * r.se + 0.01);
    }
  }
}

TEST_CASE("composed endpoint draws agree with the path construction") {
  RngStream r1(21, 0), r2(21, 1);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.1);
  std::vector<double> path_end, endpoint;
  for (int i = 0; i < 6000; ++i) {
    path_end.push_back(
        composed_time_change(0.6, 0.7, g, r1, 0.004).values.back());
    endpoint.push_back(composed_endpoint(0.6, 0.7, 1.0, r2));
  }
  CHECK(two_sample_ks(path_end, endpoint) < 0.03);
}

TEST_CASE("inverse_stable_endpoint matches the path law") {
  RngStream r1(22, 0), r2(22, 1);
  const TimeGrid g = TimeGrid::from_step(1.0, 0.5);
  std::vector<double> path_end, endpoint;
  for (int i = 0; i < 6000; ++i) {
    path_end.push_back(inverse_stable_path(0.5, g, r1, 0.004).values.back());
    endpoint.push_back(inverse_stable_endpoint(0.5, 1.0, r2));
  }
  CHECK(two_sample_ks(path_end, endpoint) < 0.03);
}
