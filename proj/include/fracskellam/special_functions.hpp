#pragma once

#include <span>
#include <vector>

namespace fracskellam {

/// Result of a truncated series evaluation. `truncation_bound` is an
/// estimate of the absolute error: the magnitude of the first omitted
/// term plus a rounding guard proportional to the largest intermediate
/// term (the series used here can cancel heavily).
struct SeriesValue {
  double value = 0.0;
  double truncation_bound = 0.0;
  int terms_used = 0;
  bool converged = true;
};

/// Long-double variant used internally by the distribution code, where
/// intermediate derivative values exceed the double range.
struct SeriesValueExt {
  long double value = 0.0L;
  long double truncation_bound = 0.0L;
  int terms_used = 0;
  bool converged = true;
};

/// Sign-tracked logarithm of a real number: value = sign * exp(log_abs).
/// sign == 0 encodes an exact zero (log_abs is then meaningless).
struct SignedLog {
  double log_abs = 0.0;
  int sign = 0;
};

struct MlConfig {
  double abs_tol = 1e-14;
  int max_terms = 200000;
  // Refusal thresholds for the plain series. For z < 0 the sum cancels down
  // from terms as large as exp(max_log_term_neg), which costs
  // max_log_term_neg/ln(10) digits; the default keeps ~7 digits of the
  // long-double accumulator in reserve. Positive arguments do not cancel
  // and are limited only by overflow.
  double max_log_term_neg = 30.0;
  double max_log_term_pos = 700.0;
  // Coarse guard for the derivative series (argument x = t^alpha c^beta).
  double series_radius = 500.0;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) =
/// sum_m z^m / Gamma(alpha*m + beta), evaluated by direct summation with
/// adaptive truncation. Requires alpha in (0,1], beta > 0. The primary
/// regime is z <= 0; moderate positive z is supported up to the series
/// radius.
SeriesValue mittag_leffler(double alpha, double beta, double z,
                           const MlConfig& cfg = MlConfig{});

/// d/dz E_{alpha,1}(z) = sum_{m>=1} m z^{m-1} / Gamma(alpha*m + 1).
SeriesValue mittag_leffler_prime(double alpha, double z,
                                 const MlConfig& cfg = MlConfig{});

/// (-d/dc)^m E_{alpha,1}(-c^beta t^alpha), by term-wise differentiation:
///   sum_i (-t^alpha)^i (-1)^m [Gamma(beta i+1)/Gamma(beta i-m+1)]
///          c^{beta i-m} / Gamma(i alpha + 1).
/// Terms whose Gamma denominator sits on a pole vanish exactly.
/// Requires c > 0 when m >= 1 (c^{beta i - m} is singular at 0).
SeriesValue ml_derivative(double alpha, double beta_space, double c, double t,
                          int m, const MlConfig& cfg = MlConfig{});

/// Long-double core. `log_scale` is added to every term's log-magnitude,
/// which lets callers fold huge prefactors (rate powers, factorials) into
/// the summation instead of overflowing on the bare derivative value.
SeriesValueExt ml_derivative_ext(double alpha, double beta_space, double c,
                                 double t, long long m,
                                 const MlConfig& cfg = MlConfig{},
                                 long double log_scale = 0.0L);

/// 1/Gamma(x); exactly 0 at the poles (non-positive integers).
double reciprocal_gamma(double x);

/// log|1/Gamma(x)| with sign; sign 0 at the poles. Safe for arguments far
/// outside the double range of Gamma itself.
SignedLog log_reciprocal_gamma(double x);

/// sin(pi*x) computed from the reduced argument, exact at integers.
double sin_pi(double x);

/// Caputo fractional derivative of order alpha in (0,1) at the right end
/// of a uniform grid, by the L1 scheme: the kernel (t-tau)^{-alpha} is
/// integrated exactly on each cell against a piecewise-constant df/dtau.
/// `f` holds samples at 0, h, 2h, ..., t and must have >= 3 points.
double caputo_derivative(std::span<const double> f, double alpha, double t);

/// One solution of sum_j j*x_j = n with x_j >= 0.
struct Composition {
  std::vector<int> parts;  // x_1 .. x_k
  int weight = 0;          // z_k = sum_j x_j
};

/// All (x_1,...,x_k) with x_j >= 0 and sum_j j*x_j = n, enumerated in a
/// deterministic order: ascending in x_k, then x_{k-1}, ..., with x_1
/// taking the remainder. (k,0) yields the single all-zero vector.
std::vector<Composition> omega_compositions(int k, int n);

/// n! / prod parts_j! in exact integer arithmetic. Throws
/// std::overflow_error once the result exceeds the documented bound of
/// 2^63 - 1, and std::invalid_argument on negative parts or a sum
/// mismatch.
long long multinomial(int n, std::span<const int> parts);

}  // namespace fracskellam
