#pragma once

#include "fracskellam/rng.hpp"
#include "fracskellam/time_grid.hpp"

namespace fracskellam {

/// One increment of the stable subordinator D_beta over a window of
/// length h, by the Kanter construction: with U ~ U(0,pi), V ~ Exp(1),
///   D_beta(h) = h^{1/beta} sin(beta U) sin((1-beta)U)^{(1-beta)/beta}
///               / (sin(U)^{1/beta} V^{(1-beta)/beta}).
/// Laplace transform E[e^{-s X}] = e^{-h s^beta}. Requires beta in (0,1).
double stable_increment(double beta, double h, RngStream& rng);

/// Cumulative sums of i.i.d. stable increments on a uniform grid.
SubordinatorPath stable_path(double beta, const TimeGrid& grid, RngStream& rng);

/// Inverse stable subordinator Y_alpha(t) = inf{x : D_alpha(x) > t} on a
/// grid, by simulating D_alpha at resolution `resolution` (defaults to
/// grid.h) and recording the first crossing: Y(t_i) = resolution * m with
/// m the first index whose D-value exceeds t_i.
SubordinatorPath inverse_stable_path(double alpha, const TimeGrid& grid,
                                     RngStream& rng, double resolution = 0.0);

/// Tempered stable increment with Laplace transform
/// e^{-h((theta+s)^beta - theta^beta)}, by exponential-tilting rejection:
/// draw X stable, accept with probability e^{-theta X}. Exact; expected
/// number of trials is e^{theta^beta h}, so keep h small.
double tempered_stable_increment(double beta, double theta, double h,
                                 RngStream& rng);

SubordinatorPath tempered_stable_path(double beta, double theta,
                                      const TimeGrid& grid, RngStream& rng);

/// Path of the composed time change D_beta(Y_alpha(t)): Y_alpha is sampled
/// on the grid first, then stable increments are drawn over the Y-increments
/// (zero-length intervals contribute 0 without consuming randomness).
/// With theta > 0 the tempered increment is used instead.
SubordinatorPath composed_time_change(double alpha, double beta,
                                      const TimeGrid& grid, RngStream& rng,
                                      double resolution = 0.0,
                                      double theta = 0.0);

/// Exact single draws via self-similarity: Y_alpha(t) =d (t / D_alpha(1))^alpha
/// and D_beta(y) =d y^{1/beta} D_beta(1).
double inverse_stable_endpoint(double alpha, double t, RngStream& rng);
double composed_endpoint(double alpha, double beta, double t, RngStream& rng,
                         double theta = 0.0);

}  // namespace fracskellam
