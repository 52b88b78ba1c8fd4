#include "fracskellam/processes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracskellam/subordinators.hpp"

namespace fracskellam {

long long gcp_count(const RateVector& rates, double tau, RngStream& rng) {
  if (tau < 0.0) throw std::domain_error("gcp_count: tau < 0");
  if (tau == 0.0) return 0;
  const double lambda_total = rates.total();
  long long n = rng.poisson(lambda_total * tau);
  if (rates.k() == 1) return n;

  long long count = 0;
  double rest = lambda_total;
  for (std::size_t j = 0; j + 1 < rates.k() && n > 0; ++j) {
    const long long nj = rng.binomial(n, rates.rates[j] / rest);
    count += static_cast<long long>(j + 1) * nj;
    n -= nj;
    rest -= rates.rates[j];
  }
  count += static_cast<long long>(rates.k()) * n;
  return count;
}

namespace {

SubordinatorPath operational_path(const ProcessSpec& spec, const TimeGrid& grid,
                                  RngStream& rng, double resolution) {
  if (spec.theta > 0.0)
    return composed_time_change(spec.alpha, spec.beta, grid, rng, resolution,
                                spec.theta);
  if (spec.alpha == 1.0 && spec.beta == 1.0) {
    SubordinatorPath p;
    p.grid = grid;
    p.values.resize(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) p.values[i] = grid.time(i);
    return p;
  }
  return composed_time_change(spec.alpha, spec.beta, grid, rng, resolution);
}

}  // namespace

CountPath process_path(const ProcessSpec& spec, const TimeGrid& grid,
                       RngStream& rng, double resolution) {
  spec.validate();
  const bool two_clocks =
      spec.family == Family::skellam && !spec.shared_clock;
  const SubordinatorPath up_clock =
      operational_path(spec, grid, rng, resolution);
  const SubordinatorPath down_clock =
      two_clocks ? operational_path(spec, grid, rng, resolution)
                 : SubordinatorPath{};

  CountPath path;
  path.grid = grid;
  path.values.resize(grid.n_points, 0);
  for (std::size_t i = 1; i < grid.n_points; ++i) {
    long long inc = 0;
    const double dw = up_clock.values[i] - up_clock.values[i - 1];
    if (dw > 0.0) inc = gcp_count(spec.up, dw, rng);
    if (spec.family == Family::skellam) {
      const double dv = two_clocks
                            ? down_clock.values[i] - down_clock.values[i - 1]
                            : dw;
      if (dv > 0.0) inc -= gcp_count(spec.down, dv, rng);
    }
    path.values[i] = path.values[i - 1] + inc;
  }
  return path;
}

long long process_endpoint(const ProcessSpec& spec, double t, RngStream& rng) {
  spec.validate();
  if (t < 0.0) throw std::domain_error("process_endpoint: t < 0");
  const double tau =
      composed_endpoint(spec.alpha, spec.beta, t, rng, spec.theta);
  long long v = tau > 0.0 ? gcp_count(spec.up, tau, rng) : 0;
  if (spec.family == Family::skellam) {
    const double tau_down =
        spec.shared_clock
            ? tau
            : composed_endpoint(spec.alpha, spec.beta, t, rng, spec.theta);
    if (tau_down > 0.0) v -= gcp_count(spec.down, tau_down, rng);
  }
  return v;
}

SamplePath running_average_path(const CountPath& path) {
  if (path.values.size() < 2)
    throw std::invalid_argument("running_average_path: need >= 2 grid points");
  SamplePath avg;
  avg.grid = path.grid;
  avg.values.resize(path.values.size(), 0.0);
  double integral = 0.0;  // exact: each grid value holds for one step
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    integral += static_cast<double>(path.values[i - 1]) * path.grid.h;
    avg.values[i] = integral / path.grid.time(i);
  }
  return avg;
}

double running_average(const JumpPath& path, double t) {
  if (!(t > 0.0)) return 0.0;
  double integral = 0.0;
  double prev_time = 0.0;
  long long prev_value = 0;
  for (std::size_t i = 0; i < path.times.size() && path.times[i] < t; ++i) {
    integral += static_cast<double>(prev_value) * (path.times[i] - prev_time);
    prev_time = path.times[i];
    prev_value = path.values[i];
  }
  integral += static_cast<double>(prev_value) * (t - prev_time);
  return integral / t;
}

long long weighted_sum_sample(const ProcessSpec& spec, double t, RngStream& rng) {
  spec.validate();
  if (spec.family != Family::skellam)
    throw std::invalid_argument("weighted_sum_sample: skellam family required");
  // Shared clock: one operational time for all k component processes, the
  // construction used in the proof. Independent clocks: one operational
  // time per side, which reproduces the factorized pmf law.
  const double tau_up =
      composed_endpoint(spec.alpha, spec.beta, t, rng, spec.theta);
  const double tau_down =
      spec.shared_clock
          ? tau_up
          : composed_endpoint(spec.alpha, spec.beta, t, rng, spec.theta);
  long long total = 0;
  for (std::size_t j = 0; j < spec.k(); ++j) {
    const long long up =
        tau_up > 0.0 ? rng.poisson(spec.up.rates[j] * tau_up) : 0;
    const long long down =
        tau_down > 0.0 ? rng.poisson(spec.down.rates[j] * tau_down) : 0;
    total += static_cast<long long>(j + 1) * (up - down);
  }
  return total;
}

long long sibuya_sample(double beta, RngStream& rng) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("sibuya_sample: beta must be in (0,1]");
  if (beta == 1.0) return 1;
  // Inversion of the survival function S(m) = Gamma(m+1-beta) /
  // (Gamma(1-beta) Gamma(m+1)) by exponential bracketing + bisection.
  const double v = rng.uniform01();
  const double log_v = std::log(v);
  const double lg1mb = std::lgamma(1.0 - beta);
  auto log_surv = [&](double m) {
    return std::lgamma(m + 1.0 - beta) - lg1mb - std::lgamma(m + 1.0);
  };
  if (log_surv(1.0) <= log_v) return 1;
  double lo = 1.0, hi = 2.0;
  while (log_surv(hi) > log_v) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) return static_cast<long long>(hi);
  }
  while (hi - lo > 0.5) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (mid <= lo || mid >= hi) break;
    if (log_surv(mid) > log_v)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<long long>(hi);
}

namespace {

long long discrete_stable_jump(const RateVector& rates, double beta,
                               RngStream& rng) {
  const long long m = sibuya_sample(beta, rng);
  if (rates.k() == 1) return m;
  // Sum of m i.i.d. GCP jump sizes; split by sequential binomials.
  long long remaining = m;
  long long jump = 0;
  double rest = rates.total();
  for (std::size_t j = 0; j + 1 < rates.k() && remaining > 0; ++j) {
    const long long nj = rng.binomial(remaining, rates.rates[j] / rest);
    jump += static_cast<long long>(j + 1) * nj;
    remaining -= nj;
    rest -= rates.rates[j];
  }
  jump += static_cast<long long>(rates.k()) * remaining;
  return jump;
}

}  // namespace

JumpPath event_path(const ProcessSpec& spec, double t_max, RngStream& rng) {
  spec.validate();
  if (spec.alpha != 1.0 || spec.theta > 0.0)
    throw std::invalid_argument(
        "event_path: only the alpha=1, untempered family is compound Poisson");
  if (!(t_max > 0.0)) throw std::domain_error("event_path: t_max must be > 0");

  const double up_rate = std::pow(spec.up.total(), spec.beta);
  const double down_rate = spec.family == Family::skellam
                               ? std::pow(spec.down.total(), spec.beta)
                               : 0.0;
  const double total_rate = up_rate + down_rate;

  JumpPath path;
  path.t_max = t_max;
  double t = 0.0;
  long long value = 0;
  for (;;) {
    t += rng.exponential(total_rate);
    if (t >= t_max) break;
    const bool up = total_rate * rng.uniform01() < up_rate;
    if (up)
      value += discrete_stable_jump(spec.up, spec.beta, rng);
    else
      value -= discrete_stable_jump(spec.down, spec.beta, rng);
    path.times.push_back(t);
    path.values.push_back(value);
  }
  return path;
}

double first_passage_time(const JumpPath& path, long long n) {
  for (std::size_t i = 0; i < path.times.size(); ++i)
    if (path.values[i] >= n) return path.times[i];
  return std::numeric_limits<double>::infinity();
}

}  // namespace fracskellam
