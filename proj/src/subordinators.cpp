#include "fracskellam/subordinators.hpp"

#include <cmath>
#include <stdexcept>

namespace fracskellam {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("stable subordinator: index must be in (0,1)");
}

// Tempered increment over a possibly long window: split into short chunks
// so that the rejection rate e^{theta^beta * chunk} stays bounded.
double tempered_over_window(double beta, double theta, double len,
                            RngStream& rng) {
  const double chunk = std::min(len, 0.5 / std::pow(theta, beta));
  double total = 0.0;
  double remaining = len;
  while (remaining > 0.0) {
    const double h = std::min(chunk, remaining);
    total += tempered_stable_increment(beta, theta, h, rng);
    remaining -= h;
  }
  return total;
}

}  // namespace

double stable_increment(double beta, double h, RngStream& rng) {
  check_beta(beta);
  if (!(h > 0.0)) throw std::domain_error("stable_increment: h must be > 0");
  for (;;) {
    const double u = rng.uniform01() * M_PI;
    const double v = rng.exponential(1.0);
    const double su = std::sin(u);
    if (su <= 0.0 || v <= 0.0) continue;  // measure-zero corner, redraw
    const double a = std::sin(beta * u);
    const double b = std::pow(std::sin((1.0 - beta) * u), (1.0 - beta) / beta);
    const double x = std::pow(h, 1.0 / beta) * a * b /
                     (std::pow(su, 1.0 / beta) * std::pow(v, (1.0 - beta) / beta));
    if (x > 0.0 && std::isfinite(x)) return x;
  }
}

SubordinatorPath stable_path(double beta, const TimeGrid& grid, RngStream& rng) {
  check_beta(beta);
  SubordinatorPath path;
  path.grid = grid;
  path.values.resize(grid.n_points, 0.0);
  for (std::size_t i = 1; i < grid.n_points; ++i)
    path.values[i] = path.values[i - 1] + stable_increment(beta, grid.h, rng);
  return path;
}

SubordinatorPath inverse_stable_path(double alpha, const TimeGrid& grid,
                                     RngStream& rng, double resolution) {
  check_beta(alpha);
  const double res = resolution > 0.0 ? resolution : grid.h;
  if (!(res > 0.0))
    throw std::invalid_argument("inverse_stable_path: resolution must be > 0");

  SubordinatorPath path;
  path.grid = grid;
  path.values.resize(grid.n_points, 0.0);

  double d = 0.0;       // D_alpha at the current step
  std::uint64_t m = 0;  // number of resolution steps taken
  for (std::size_t i = 1; i < grid.n_points; ++i) {
    const double t = grid.time(i);
    while (d <= t) {
      d += stable_increment(alpha, res, rng);
      ++m;
    }
    path.values[i] = res * static_cast<double>(m);
  }
  return path;
}

double tempered_stable_increment(double beta, double theta, double h,
                                 RngStream& rng) {
  check_beta(beta);
  if (!(theta > 0.0))
    throw std::domain_error("tempered_stable_increment: theta must be > 0");
  if (!(h > 0.0))
    throw std::domain_error("tempered_stable_increment: h must be > 0");
  for (;;) {
    const double x = stable_increment(beta, h, rng);
    if (rng.uniform01() < std::exp(-theta * x)) return x;
  }
}

SubordinatorPath tempered_stable_path(double beta, double theta,
                                      const TimeGrid& grid, RngStream& rng) {
  SubordinatorPath path;
  path.grid = grid;
  path.values.resize(grid.n_points, 0.0);
  if (beta == 1.0) {
    // (theta+s) - theta = s: the time change degenerates to the identity.
    for (std::size_t i = 1; i < grid.n_points; ++i) path.values[i] = grid.time(i);
    return path;
  }
  for (std::size_t i = 1; i < grid.n_points; ++i)
    path.values[i] =
        path.values[i - 1] + tempered_stable_increment(beta, theta, grid.h, rng);
  return path;
}

SubordinatorPath composed_time_change(double alpha, double beta,
                                      const TimeGrid& grid, RngStream& rng,
                                      double resolution, double theta) {
  SubordinatorPath inner;
  if (alpha == 1.0) {
    inner.grid = grid;
    inner.values.resize(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) inner.values[i] = grid.time(i);
  } else {
    inner = inverse_stable_path(alpha, grid, rng, resolution);
  }
  if (beta == 1.0 && theta == 0.0) return inner;

  SubordinatorPath path;
  path.grid = grid;
  path.values.resize(grid.n_points, 0.0);
  for (std::size_t i = 1; i < grid.n_points; ++i) {
    const double dy = inner.values[i] - inner.values[i - 1];
    double q = 0.0;
    if (dy > 0.0)
      q = theta > 0.0 ? tempered_over_window(beta, theta, dy, rng)
                      : stable_increment(beta, dy, rng);
    path.values[i] = path.values[i - 1] + q;
  }
  return path;
}

double inverse_stable_endpoint(double alpha, double t, RngStream& rng) {
  check_beta(alpha);
  if (!(t >= 0.0)) throw std::domain_error("inverse_stable_endpoint: t < 0");
  if (t == 0.0) return 0.0;
  const double d1 = stable_increment(alpha, 1.0, rng);
  return std::pow(t / d1, alpha);
}

double composed_endpoint(double alpha, double beta, double t, RngStream& rng,
                         double theta) {
  const double y = alpha == 1.0 ? t : inverse_stable_endpoint(alpha, t, rng);
  if (y <= 0.0) return 0.0;
  if (beta == 1.0 && theta == 0.0) return y;
  if (theta > 0.0) {
    if (beta == 1.0) return y;
    return tempered_over_window(beta, theta, y, rng);
  }
  return stable_increment(beta, y, rng);
}

}  // namespace fracskellam
