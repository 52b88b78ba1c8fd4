#pragma once

#include "fracskellam/process_spec.hpp"
#include "fracskellam/rng.hpp"
#include "fracskellam/time_grid.hpp"

namespace fracskellam {

/// Count of a generalized counting process after operational time tau:
/// a compound Poisson draw, N ~ Poisson(Lambda*tau) events split over the
/// jump sizes 1..k with probabilities lambda_j/Lambda (the split is drawn
/// as sequential binomials, which keeps the cost O(k) for any N).
long long gcp_count(const RateVector& rates, double tau, RngStream& rng);

/// Sample path of the process named by `spec` on a uniform grid: the
/// operational clock (identity / stable / inverse-stable / tempered /
/// composed, as the indices require) is simulated first, then independent
/// up- and down-counting streams run on its increments and are differenced
/// for the skellam family. `resolution` refines the inverse-stable stage
/// (defaults to grid.h).
CountPath process_path(const ProcessSpec& spec, const TimeGrid& grid,
                       RngStream& rng, double resolution = 0.0);

/// Value of the process at a single time, using exact endpoint draws for
/// the operational clock (distribution-equal to process_path at t, minus
/// the inverse-stable grid bias).
long long process_endpoint(const ProcessSpec& spec, double t, RngStream& rng);

/// Exact integral of the piecewise-constant path divided by elapsed time;
/// the value at t=0 is defined as 0.
SamplePath running_average_path(const CountPath& path);

/// Running average of an event-level path at time t (exact rectangle sum).
double running_average(const JumpPath& path, double t);

/// One draw of the weighted-sum construction: a single operational time
/// tau = D_beta(Y_alpha(t)) shared by k independent Skellam counts with
/// rates (lambda_j, mu_j); returns sum_j j * S_j(tau).
long long weighted_sum_sample(const ProcessSpec& spec, double t, RngStream& rng);

/// Sibuya(beta) jump count: P(M > m) = prod_{i<=m} (1 - beta/i); the
/// number of unit events bundled into one jump of a space-fractional
/// process. beta = 1 gives M = 1 almost surely.
long long sibuya_sample(double beta, RngStream& rng);

/// Event-level sample path for the alpha=1, untempered family, using its
/// compound Poisson structure: events arrive at rate Lambda^beta (+T^beta
/// for skellam) and each event jumps by a Sibuya(beta)-compounded sum of
/// GCP jump sizes. Exact in continuous time, so path functionals (running
/// averages, first passage) carry no grid bias.
JumpPath event_path(const ProcessSpec& spec, double t_max, RngStream& rng);

/// First time the event path reaches or exceeds level n, or +inf.
double first_passage_time(const JumpPath& path, long long n);

}  // namespace fracskellam
