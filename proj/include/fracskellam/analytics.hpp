#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "fracskellam/process_spec.hpp"

namespace fracskellam {

/// Probability value with an explicit absolute truncation-error bound.
struct PmfResult {
  long long n = 0;
  double probability = 0.0;
  double truncation_bound = 0.0;
  bool converged = true;
};

/// A real value carrying a truncation bound (CDF sums, factors).
struct BoundedReal {
  double value = 0.0;
  double bound = 0.0;
  bool converged = true;
};

/// Which printed form of the pmf to evaluate. Both sum the same outer
/// series; they differ in how the Mittag-Leffler derivative factors are
/// arranged numerically (explicit derivative values times rate powers vs
/// the expanded Gamma-ratio terms with the rate powers absorbed).
enum class PmfMethod { theorem31, remark32 };

struct PmfOptions {
  PmfMethod method = PmfMethod::theorem31;
  double tol = 1e-10;        // absolute truncation target per value
  std::size_t y_cap = 400000;  // outer-series hard cap
};

/// P{M_beta^alpha(t) = n} for the counting family (theta = 0):
/// sum over Omega(k,n) of prod_j lambda_j^{x_j}/x_j! times
/// (-d/dLambda)^{z_k} E_{alpha,1}(-Lambda^beta t^alpha).
PmfResult gstfcp_pmf(const ProcessSpec& spec, double t, long long n,
                     const PmfOptions& opt = PmfOptions{});

/// P{S_beta^alpha(t) = n} for the skellam family (theta = 0).
PmfResult gstfsp_pmf(const ProcessSpec& spec, double t, long long n,
                     const PmfOptions& opt = PmfOptions{});

/// Window of pmf values (skellam: n in [n_lo, n_hi]; counting: max(n_lo,0)
/// to n_hi). Shares the series tables across n, so wide windows cost
/// little more than a single evaluation.
struct PmfWindow {
  long long n_lo = 0;
  long long n_hi = 0;
  std::vector<PmfResult> values;
  double sum = 0.0;        // sum of probabilities over the window
  double bound_sum = 0.0;  // sum of truncation bounds
  bool converged = true;
  const PmfResult& at(long long n) const { return values.at(n - n_lo); }
};
PmfWindow pmf_window(const ProcessSpec& spec, double t, long long n_lo,
                     long long n_hi, const PmfOptions& opt = PmfOptions{});

/// Probability generating function E[u^X] at u in (0,1]. For the skellam
/// family with beta < 1 the second Mittag-Leffler argument has a negative
/// base raised to beta, which is not real-valued: that region throws
/// std::domain_error (beta = 1 and the counting family are fully served).
double gstfsp_pgf(const ProcessSpec& spec, double t, double u);

/// Mean/variance (beta = 1 families only; moments do not exist for
/// beta < 1) and covariance (alpha = 1 only, where the time change is
/// deterministic).
struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  bool covariance_available = false;
  double cov_rate = 0.0;  // covariance(s,t) = cov_rate * min(s,t)
  double covariance(double s, double t) const;
};
MomentSet moments(const ProcessSpec& spec, double t);

/// q-th fractional moment of the counting family, q in (0,1):
/// E(X^q) = (1/Gamma(1-q)) * Int_0^inf u^{-q} * (-d/du LT)(u) du with the
/// integrand evaluated through the differentiated Mittag-Leffler series.
/// For beta < 1 the moment is finite only for q < beta; at q >= beta the
/// integral diverges and the result is flagged non-converged (+inf).
struct FracMomentResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
};
FracMomentResult fractional_moment(const ProcessSpec& spec, double t, double q);

/// F_{tau_n}(t) = P(X(t) >= n): distribution of the n-th arrival time.
BoundedReal arrival_time_cdf(const ProcessSpec& spec, double t, long long n,
                             const PmfOptions& opt = PmfOptions{});

/// P{T_n > t} for the first upcrossing time of level n >= 1.
/// `as_stated` sums states 0..n-1 (the printed display); `full_support`
/// sums the whole lower support (= P(X(t) < n)).
enum class PassageConvention { as_stated, full_support };
BoundedReal first_passage_survival(const ProcessSpec& spec, double t,
                                   long long n, PassageConvention convention,
                                   const PmfOptions& opt = PmfOptions{});

/// Marginal pmf of the increment process of the alpha=1 counting family:
/// the pmf factor at elapsed time t times the (analytically unit) series
/// factor at the window start v. Its v-invariance is the testable
/// identity; the returned bound covers the truncated v-factor.
PmfResult increment_pmf_gsfcp(const RateVector& up_rates, double beta, double t,
                              double v, long long n,
                              const PmfOptions& opt = PmfOptions{});

/// |p(n,t) - recurrence RHS| for the beta=1 families:
///   skellam: p(n,t) = (t/n) sum_j j (lambda_j p(n-j,t) - mu_j p(n+j,t))
///   counting: p(n,t) = (t/n) sum_j j lambda_j p(n-j,t)
/// Exact for alpha = 1; exposed for alpha < 1 as well, where the printed
/// extension does not hold and the residual is genuinely nonzero.
double recurrence_residual(const ProcessSpec& spec, double t, long long n,
                           const PmfOptions& opt = PmfOptions{});

/// Tail asymptote P(X(t) > x) for large x (beta < 1). Counting families
/// have the closed form x^{-beta} (sum_j j lambda_j)^beta t^alpha /
/// (Gamma(1-beta) Gamma(alpha+1)); the skellam form weights shifted
/// counting tails by the down-side pmf and truncates the series with a
/// reported bound. upper_bound is the explicit skellam tail bound,
/// present only for beta in (1/2, 1).
struct TailEstimate {
  double x = 0.0;
  double asymptote = 0.0;
  std::optional<double> upper_bound;
  double truncation_bound = 0.0;
};
TailEstimate tail_asymptote(const ProcessSpec& spec, double t, double x,
                            const PmfOptions& opt = PmfOptions{});

/// Explicit upper bound for the skellam tail P(X(t) > x), beta in (1/2,1):
///   t^{2 alpha} x^{1-2 beta} Gamma(2 beta - 1) (sum j lambda_j)^beta
///   (sum j mu_j)^beta / (Gamma(1-beta) Gamma(alpha+1)^2 Gamma(beta)).
double tail_upper_bound(const ProcessSpec& spec, double t, double x);

/// Characteristic function of the running average at time t (alpha = 1
/// families only; the time-fractional process is not Levy):
///   phi(u) = exp{-t Int_0^1 [(sum_j (1-e^{iuzj}) lambda_j)^beta
///                            + (sum_j (1-e^{-iuzj}) mu_j)^beta] dz}.
struct CharFnResult {
  std::complex<double> value{1.0, 0.0};
  double quad_error = 0.0;
  bool converged = true;
};
CharFnResult running_avg_charfn(const ProcessSpec& spec, double t, double u);

/// Default pmf support half-width: 60, or mean + 10 sd when moments exist
/// (beta = 1), whichever is larger.
long long default_window(const ProcessSpec& spec, double t);

/// Upper bound (beta = 1: Chernoff through the Mittag-Leffler mgf;
/// beta < 1: the tail-asymptote estimate) for P(X(t) > x) [upper=true]
/// or P(X(t) < -x) [upper=false].
double tail_mass_estimate(const ProcessSpec& spec, double t, double x,
                          bool upper);

}  // namespace fracskellam
