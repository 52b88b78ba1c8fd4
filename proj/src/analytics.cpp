#include "fracskellam/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "fracskellam/quadrature.hpp"
#include "fracskellam/special_functions.hpp"

namespace fracskellam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LdBounded {
  long double v = 0.0L;
  long double b = 0.0L;
  bool conv = true;
};

MlConfig pmf_series_config() {
  MlConfig cfg;
  cfg.abs_tol = 1e-19;
  return cfg;
}

// Scalar-rate pmf p(m) = rate^m/m! * (-d/drate)^m E_{a,1}(-rate^b t^a).
// Both printed arrangements are exposed: theorem31 evaluates the bare
// derivative and multiplies by the rate-power/factorial prefactor;
// remark32 folds the rate powers into the expanded Gamma-ratio terms and
// divides by m! at the end. Either arrangement can overflow long double
// for extreme m, in which case the fully fused form (prefactor inside
// every term, immune by construction) takes over.
LdBounded stfpp_pmf_ld(double rate, double a, double b, double t, long long m,
                       PmfMethod method) {
  const MlConfig cfg = pmf_series_config();
  const long double log_rate = logl((long double)rate);
  const long double lg_m1 = lgammal((long double)m + 1.0L);
  if (method == PmfMethod::theorem31) {
    const SeriesValueExt d = ml_derivative_ext(a, b, rate, t, m, cfg);
    if (d.converged) {
      const long double s = expl(m * log_rate - lg_m1);
      return {s * d.value, s * d.truncation_bound, true};
    }
  } else {
    const SeriesValueExt d =
        ml_derivative_ext(a, b, rate, t, m, cfg, m * log_rate);
    if (d.converged) {
      const long double s = expl(-lg_m1);
      return {s * d.value, s * d.truncation_bound, true};
    }
  }
  const SeriesValueExt d =
      ml_derivative_ext(a, b, rate, t, m, cfg, m * log_rate - lg_m1);
  return {d.value, d.truncation_bound, d.converged};
}

struct StfppTable {
  std::vector<long double> v;
  std::vector<long double> b;
  long double mass = 0.0L;
  long double bound_mass = 0.0L;
  bool converged = true;

  void extend(double rate, double a, double bsp, double t, std::size_t upto,
              PmfMethod method) {
    while (v.size() < upto) {
      const LdBounded p = stfpp_pmf_ld(rate, a, bsp, t,
                                       static_cast<long long>(v.size()), method);
      v.push_back(p.v);
      b.push_back(p.b);
      mass += p.v;
      bound_mass += p.b;
      if (!p.conv) converged = false;
    }
  }
  // P(X > size-1), from the accumulated mass plus its rounding budget.
  long double tail_mass() const {
    long double r = 1.0L - mass + bound_mass;
    return r > 0.0L ? r : 0.0L;
  }
  // Largest value over the last few entries; a conservative stand-in for
  // sup_{m >= size} p(m) once the tail is decreasing.
  long double tail_sup() const {
    long double s = 0.0L;
    const std::size_t k = v.size() > 8 ? v.size() - 8 : 0;
    for (std::size_t i = k; i < v.size(); ++i) s = std::max(s, v[i]);
    return s;
  }
  bool tail_decreasing() const {
    if (v.size() < 24) return false;
    long double prev_max = 0.0L, last_max = 0.0L;
    for (std::size_t i = v.size() - 16; i < v.size() - 8; ++i)
      prev_max = std::max(prev_max, v[i]);
    for (std::size_t i = v.size() - 8; i < v.size(); ++i)
      last_max = std::max(last_max, v[i]);
    return last_max <= prev_max;
  }
};

void require_untempered(const ProcessSpec& spec, const char* op) {
  if (spec.theta > 0.0)
    throw std::invalid_argument(std::string(op) +
                                ": tempered specs have no closed pmf here");
}

// Counting-family pmf table P[0..len). For k = 1 the scalar series is the
// whole story. For k > 1 the composition sum is reorganized as an
// event-count mixture: P(value = v) = sum_e p_E(e) q^{*e}(v) with p_E the
// scalar-rate table at Lambda and q the jump-size law lambda_j/Lambda,
// algebraically identical to the printed composition formula (the inner
// multinomial is exactly the e-fold convolution), but O(len^2 k) instead
// of composition enumeration. The convolution is lower-triangular, so
// truncation at len loses no mass for v < len.
StfppTable counting_pmf_table(const RateVector& rates, double a, double b,
                              double t, std::size_t len, PmfMethod method) {
  StfppTable out;
  if (rates.k() == 1) {
    out.extend(rates.total(), a, b, t, len, method);
    return out;
  }
  const double lam = rates.total();
  StfppTable events;
  events.extend(lam, a, b, t, len, method);

  const std::size_t k = rates.k();
  std::vector<long double> q(k);
  for (std::size_t j = 0; j < k; ++j) q[j] = (long double)(rates.rates[j] / lam);

  std::vector<long double> conv(len, 0.0L);  // q^{*e}, updated in place
  conv[0] = 1.0L;
  out.v.assign(len, 0.0L);
  out.b.assign(len, 0.0L);
  out.v[0] += events.v[0];
  out.b[0] += events.b[0];
  for (std::size_t e = 1; e < len; ++e) {
    for (std::size_t v = len - 1; v >= 1; --v) {
      long double s = 0.0L;
      for (std::size_t j = 1; j <= k && j <= v; ++j) s += q[j - 1] * conv[v - j];
      conv[v] = s;
      if (v == e) break;  // q^{*e} has no mass below e
    }
    if (e - 1 < len) conv[e - 1] = 0.0L;
    for (std::size_t v = e; v < len; ++v) {
      out.v[v] += events.v[e] * conv[v];
      out.b[v] += events.b[e] * conv[v];
    }
  }
  for (std::size_t v = 0; v < len; ++v) {
    out.mass += out.v[v];
    out.bound_mass += out.b[v];
  }
  out.converged = events.converged;
  return out;
}

PmfResult finalize(long long n, long double p, long double bound, bool conv) {
  PmfResult r;
  r.n = n;
  if (p < 0.0L) {  // rounding can push a vanishing probability negative
    bound += -p;
    p = 0.0L;
  }
  r.probability = static_cast<double>(p);
  r.truncation_bound = static_cast<double>(bound);
  r.converged = conv;
  return r;
}

PmfWindow counting_window(const ProcessSpec& spec, double t, long long n_lo,
                          long long n_hi, const PmfOptions& opt) {
  PmfWindow w;
  w.n_lo = std::max<long long>(n_lo, 0);
  w.n_hi = n_hi;
  if (w.n_hi < w.n_lo)
    throw std::invalid_argument("pmf_window: empty counting window");

  const int k = static_cast<int>(spec.k());
  const double lambda_total = spec.up.total();
  std::vector<SeriesValueExt> deriv;  // memoized by derivative order
  deriv.reserve(static_cast<std::size_t>(w.n_hi) + 1);
  const MlConfig cfg = pmf_series_config();
  auto deriv_at = [&](int m) -> const SeriesValueExt& {
    while (static_cast<int>(deriv.size()) <= m)
      deriv.push_back(ml_derivative_ext(spec.alpha, spec.beta, lambda_total, t,
                                        static_cast<long long>(deriv.size()),
                                        cfg));
    return deriv[static_cast<std::size_t>(m)];
  };

  for (long long n = w.n_lo; n <= w.n_hi; ++n) {
    if (t == 0.0) {
      w.values.push_back(finalize(n, n == 0 ? 1.0L : 0.0L, 0.0L, true));
      continue;
    }
    if (k == 1) {
      const LdBounded p = stfpp_pmf_ld(lambda_total, spec.alpha, spec.beta, t,
                                       n, opt.method);
      w.values.push_back(finalize(n, p.v, p.b, p.conv));
      continue;
    }
    long double sum = 0.0L, bound = 0.0L;
    bool conv = true;
    for (const Composition& comp :
         omega_compositions(k, static_cast<int>(n))) {
      long double log_coeff = 0.0L;
      bool zero = false;
      for (int j = 0; j < k; ++j) {
        if (comp.parts[j] == 0) continue;
        if (spec.up.rates[j] == 0.0) {
          zero = true;
          break;
        }
        log_coeff += comp.parts[j] * logl((long double)spec.up.rates[j]) -
                     lgammal(comp.parts[j] + 1.0L);
      }
      if (zero) continue;
      const long double coeff = expl(log_coeff);
      const SeriesValueExt& d = deriv_at(comp.weight);
      sum += coeff * d.value;
      bound += coeff * d.truncation_bound;
      if (!d.converged) conv = false;
    }
    w.values.push_back(finalize(n, sum, bound, conv));
  }
  for (const PmfResult& r : w.values) {
    w.sum += r.probability;
    w.bound_sum += r.truncation_bound;
    if (!r.converged) w.converged = false;
  }
  return w;
}

PmfWindow skellam_window(const ProcessSpec& spec, double t, long long n_lo,
                         long long n_hi, const PmfOptions& opt) {
  PmfWindow w;
  w.n_lo = n_lo;
  w.n_hi = n_hi;
  if (n_hi < n_lo) throw std::invalid_argument("pmf_window: empty window");

  if (t == 0.0) {
    for (long long n = n_lo; n <= n_hi; ++n)
      w.values.push_back(finalize(n, n == 0 ? 1.0L : 0.0L, 0.0L, true));
    for (const PmfResult& r : w.values) w.sum += r.probability;
    return w;
  }

  const std::size_t abs_max = static_cast<std::size_t>(
      std::max(std::llabs(n_lo), std::llabs(n_hi)));
  // Counting pmf tables for the two sides. k = 1 admits the printed
  // scalar collapse; k > 1 convolves the two counting laws directly (the
  // printed cross-collapse exchanges the jump-value constraint for an
  // event-count one and does not describe this process).
  const bool scalar = spec.k() == 1;
  const bool same_rates = spec.up.rates == spec.down.rates;
  StfppTable up;
  StfppTable down;

  // Predict the outer length from the heavy-tail decay: the neglected
  // remainder behaves like C1 C2 beta Y^{-(1+2 beta)}, with C the
  // one-sided tail constants. Light tails (beta = 1) start small.
  std::size_t y = 1024;
  if (spec.beta < 1.0) {
    const double t_alpha = std::pow(t, spec.alpha);
    const double rg = reciprocal_gamma(1.0 - spec.beta) *
                      reciprocal_gamma(spec.alpha + 1.0);
    const double c1 = std::pow(spec.up.weighted_total(), spec.beta) * t_alpha * rg;
    const double c2 =
        std::pow(spec.down.weighted_total(), spec.beta) * t_alpha * rg;
    const double y_est = std::pow(
        std::max(spec.beta * c1 * c2, 1e-6) / std::max(opt.tol, 1e-14),
        1.0 / (1.0 + 2.0 * spec.beta));
    y = std::max<std::size_t>(
        1024, std::min<std::size_t>(static_cast<std::size_t>(1.3 * y_est) + 1,
                                    opt.y_cap));
  }

  // Grow the shared outer series until the neglected remainder
  //   sum_{y > Y} p_up(|n|+y) p_down(y)  <=  tail_mass * sup(tail pmf)
  // is below tolerance for every n in the window (and symmetrically for
  // n < 0 with the roles exchanged).
  long double remainder = 1.0L;
  for (;;) {
    const std::size_t len = abs_max + y + 1;
    if (scalar) {
      up.extend(spec.up.total(), spec.alpha, spec.beta, t, len, opt.method);
      down.extend(spec.down.total(), spec.alpha, spec.beta, t, len, opt.method);
    } else {
      up = counting_pmf_table(spec.up, spec.alpha, spec.beta, t, len,
                              opt.method);
      down = same_rates ? up
                        : counting_pmf_table(spec.down, spec.alpha, spec.beta,
                                             t, len, opt.method);
    }
    if (up.tail_decreasing() && down.tail_decreasing()) {
      const long double r_pos =
          std::min(down.tail_mass() * up.tail_sup(),
                   up.tail_mass() * down.tail_sup());
      const long double r_neg =
          std::min(up.tail_mass() * down.tail_sup(),
                   down.tail_mass() * up.tail_sup());
      remainder = std::max(r_pos, r_neg);
      if (remainder < (long double)opt.tol) break;
    }
    if (y >= opt.y_cap) {
      w.converged = false;
      break;
    }
    y *= 2;
  }
  if (!up.converged || !down.converged) w.converged = false;

  const std::size_t len = up.v.size();
  for (long long n = n_lo; n <= n_hi; ++n) {
    const std::size_t a = static_cast<std::size_t>(std::llabs(n));
    const StfppTable& big = (n >= 0) ? up : down;
    const StfppTable& small = (n >= 0) ? down : up;
    long double sum = 0.0L, bound = 0.0L;
    for (std::size_t i = 0; a + i < len; ++i) {
      const long double p1 = big.v[a + i], b1 = big.b[a + i];
      const long double p2 = small.v[i], b2 = small.b[i];
      sum += p1 * p2;
      bound += b1 * p2 + p1 * b2 + b1 * b2;
    }
    bound += remainder;
    w.values.push_back(finalize(n, sum, bound, w.converged));
  }
  for (const PmfResult& r : w.values) {
    w.sum += r.probability;
    w.bound_sum += r.truncation_bound;
  }
  return w;
}

}  // namespace

PmfWindow pmf_window(const ProcessSpec& spec, double t, long long n_lo,
                     long long n_hi, const PmfOptions& opt) {
  spec.validate();
  require_untempered(spec, "pmf_window");
  if (t < 0.0) throw std::domain_error("pmf_window: t < 0");
  return spec.family == Family::counting
             ? counting_window(spec, t, n_lo, n_hi, opt)
             : skellam_window(spec, t, n_lo, n_hi, opt);
}

PmfResult gstfcp_pmf(const ProcessSpec& spec, double t, long long n,
                     const PmfOptions& opt) {
  if (spec.family != Family::counting)
    throw std::invalid_argument("gstfcp_pmf: counting family required");
  if (n < 0) throw std::domain_error("gstfcp_pmf: n < 0");
  return pmf_window(spec, t, n, n, opt).values.front();
}

PmfResult gstfsp_pmf(const ProcessSpec& spec, double t, long long n,
                     const PmfOptions& opt) {
  if (spec.family != Family::skellam)
    throw std::invalid_argument("gstfsp_pmf: skellam family required");
  return pmf_window(spec, t, n, n, opt).values.front();
}

double gstfsp_pgf(const ProcessSpec& spec, double t, double u) {
  spec.validate();
  require_untempered(spec, "gstfsp_pgf");
  if (!(u > 0.0 && u <= 1.0))
    throw std::domain_error("gstfsp_pgf: u must be in (0,1]");
  if (t < 0.0) throw std::domain_error("gstfsp_pgf: t < 0");
  if (t == 0.0 || u == 1.0) return 1.0;

  const double t_alpha = std::pow(t, spec.alpha);
  double a_up = 0.0;
  for (std::size_t j = 0; j < spec.k(); ++j)
    a_up += (1.0 - std::pow(u, double(j + 1))) * spec.up.rates[j];
  const SeriesValue f_up = mittag_leffler(
      spec.alpha, 1.0, -std::pow(a_up, spec.beta) * t_alpha);
  if (spec.family == Family::counting) return f_up.value;

  double a_dn = 0.0;
  for (std::size_t j = 0; j < spec.k(); ++j)
    a_dn += (1.0 - std::pow(u, -double(j + 1))) * spec.down.rates[j];
  // a_dn <= 0 for u < 1; its beta-th power is real only for beta = 1.
  double arg;
  if (spec.beta == 1.0) {
    arg = -a_dn * t_alpha;
  } else if (a_dn < 0.0) {
    throw std::domain_error(
        "gstfsp_pgf: negative base under a fractional power (beta < 1, "
        "u < 1); only beta = 1 or the counting p.g.f. is real-valued");
  } else {
    arg = 0.0;
  }
  const SeriesValue f_dn = mittag_leffler(spec.alpha, 1.0, arg);
  return f_up.value * f_dn.value;
}

double MomentSet::covariance(double s, double t) const {
  if (!covariance_available)
    throw std::logic_error(
        "MomentSet: covariance exposed only for alpha = 1 (the time change "
        "is deterministic there)");
  return cov_rate * std::min(s, t);
}

MomentSet moments(const ProcessSpec& spec, double t) {
  spec.validate();
  if (spec.beta != 1.0)
    throw std::invalid_argument(
        "moments: integer moments do not exist for beta < 1");
  require_untempered(spec, "moments");
  if (t < 0.0) throw std::domain_error("moments: t < 0");

  const double t_alpha = std::pow(t, spec.alpha);
  const double ey = t_alpha * reciprocal_gamma(spec.alpha + 1.0);
  const double vy =
      (2.0 * reciprocal_gamma(2.0 * spec.alpha + 1.0) -
       reciprocal_gamma(spec.alpha + 1.0) * reciprocal_gamma(spec.alpha + 1.0)) *
      t_alpha * t_alpha;

  MomentSet m;
  const double ju = spec.up.weighted_total();
  const double ju2 = spec.up.weighted_sq_total();
  if (spec.family == Family::counting) {
    m.mean = ey * ju;
    m.variance = ey * ju2 + vy * ju * ju;
    m.cov_rate = ju2;
  } else {
    const double jd = spec.down.weighted_total();
    const double jd2 = spec.down.weighted_sq_total();
    m.mean = ey * (ju - jd);
    m.variance = ey * (ju2 + jd2) + vy * (ju * ju + jd * jd);
    m.cov_rate = ju2 + jd2;
  }
  m.covariance_available = (spec.alpha == 1.0);
  return m;
}

FracMomentResult fractional_moment(const ProcessSpec& spec, double t, double q) {
  spec.validate();
  if (spec.family != Family::counting)
    throw std::invalid_argument("fractional_moment: counting family required");
  require_untempered(spec, "fractional_moment");
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("fractional_moment: q must be in (0,1)");
  if (!(t > 0.0)) return {0.0, 0.0, true};

  FracMomentResult out;
  if (spec.beta < 1.0 && q >= spec.beta) {
    // The integrand behaves like u^{beta-q-1} at 0: not integrable.
    out.value = kInf;
    out.abs_error = kInf;
    out.converged = false;
    return out;
  }

  const double t_alpha = std::pow(t, spec.alpha);
  auto g = [&](double u) {
    double s = 0.0;
    for (std::size_t j = 0; j < spec.k(); ++j)
      s += (1.0 - std::exp(-u * double(j + 1))) * spec.up.rates[j];
    return s;
  };
  auto g_prime = [&](double u) {
    double s = 0.0;
    for (std::size_t j = 0; j < spec.k(); ++j)
      s += double(j + 1) * std::exp(-u * double(j + 1)) * spec.up.rates[j];
    return s;
  };
  // psi(u) = -d/du LT(u), through the differentiated series. Near zero
  // psi ~ beta t^alpha (w u)^{beta-1} w / Gamma(alpha+1) with w = sum j l_j;
  // the explicit form avoids 0 * inf once u underflows.
  const double wsum = spec.up.weighted_total();
  auto psi = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double gu = g(u);
    if (gu <= 0.0)
      return spec.beta * t_alpha * std::pow(wsum * u, spec.beta - 1.0) * wsum *
             reciprocal_gamma(spec.alpha + 1.0);
    const double base = spec.beta * t_alpha *
                        std::pow(gu, spec.beta - 1.0) * g_prime(u);
    if (spec.alpha == 1.0)
      return base * std::exp(-t * std::pow(gu, spec.beta));
    const SeriesValue ep =
        mittag_leffler_prime(spec.alpha, -std::pow(gu, spec.beta) * t_alpha);
    return base * (-ep.value);
  };

  // [0,1]: substitute u = s^{1/(1-q)} to absorb u^{-q}, composed with a
  // second power map that flattens the remaining u^{beta-1} factor; the
  // combined map is u = s^{1/(beta-q)} (which is the plain substitution
  // when beta = 1), leaving an O(1) integrand at the origin.
  const double p = 1.0 / (spec.beta - q);
  QuadOptions qopt;
  qopt.abs_tol = 1e-11;
  qopt.rel_tol = 1e-9;
  const double limit0 = p * spec.beta * t_alpha * std::pow(wsum, spec.beta) *
                        reciprocal_gamma(spec.alpha + 1.0);
  const auto inner = integrate(
      [&](double s) {
        if (s <= 0.0) return limit0;
        const double u = std::pow(s, p);
        if (u < 1e-12) return limit0;  // flattened integrand's s->0 value
        return psi(u) * p * std::pow(s, p - 1.0) * std::pow(u, -q);
      },
      0.0, 1.0, qopt);

  // [1,U]: the integrand decays exponentially through g'(u).
  double upper = 2.0;
  while (psi(upper) * std::pow(upper, -q) > 1e-16 && upper < 4096.0)
    upper *= 2.0;
  const auto outer = integrate(
      [&](double u) { return psi(u) * std::pow(u, -q); }, 1.0, upper, qopt);
  const double tail_guard = psi(upper) * std::pow(upper, -q) * 2.0;

  const double rg = reciprocal_gamma(1.0 - q);
  out.value = (inner.value + outer.value) * rg;
  out.abs_error = (inner.error + outer.error + tail_guard) * rg;
  out.converged = inner.converged && outer.converged;
  return out;
}

long long default_window(const ProcessSpec& spec, double t) {
  if (spec.beta < 1.0) return 60;
  const MomentSet m = moments(spec, t);
  const double w = std::fabs(m.mean) + 10.0 * std::sqrt(std::max(m.variance, 0.0));
  return std::max<long long>(60, static_cast<long long>(std::ceil(w)));
}

double tail_mass_estimate(const ProcessSpec& spec, double t, double x,
                          bool upper) {
  spec.validate();
  require_untempered(spec, "tail_mass_estimate");
  const RateVector& side = upper ? spec.up
                          : (spec.family == Family::skellam
                                 ? spec.down
                                 : throw std::invalid_argument(
                                       "tail_mass_estimate: counting lower "
                                       "tail is empty"));
  if (spec.beta < 1.0) {
    // Event-count bound: the process is at most k times its event count,
    // whose tail has the scalar-rate asymptote.
    const double xe = x / static_cast<double>(spec.k());
    return std::pow(xe, -spec.beta) * std::pow(side.total(), spec.beta) *
           std::pow(t, spec.alpha) * reciprocal_gamma(1.0 - spec.beta) *
           reciprocal_gamma(spec.alpha + 1.0);
  }
  // beta = 1: Chernoff bound through the Mittag-Leffler mgf,
  // E[e^{theta X}] = E_{alpha,1}(t^alpha sum_j (e^{theta j}-1) lambda_j)
  //                * E_{alpha,1}(t^alpha sum_j (e^{-theta j}-1) mu_j).
  const double t_alpha = std::pow(t, spec.alpha);
  double best = 1.0;
  for (double theta = 0.125; theta <= 3.0; theta += 0.125) {
    double arg_grow = 0.0, arg_shrink = 0.0;
    for (std::size_t j = 0; j < spec.k(); ++j) {
      const double lam = side.rates[j];
      arg_grow += (std::exp(theta * double(j + 1)) - 1.0) * lam;
    }
    if (spec.family == Family::skellam) {
      const RateVector& other = upper ? spec.down : spec.up;
      for (std::size_t j = 0; j < spec.k(); ++j)
        arg_shrink += (std::exp(-theta * double(j + 1)) - 1.0) * other.rates[j];
    }
    const SeriesValue grow = mittag_leffler(spec.alpha, 1.0, t_alpha * arg_grow);
    if (!grow.converged || !std::isfinite(grow.value)) continue;
    const SeriesValue shrink =
        mittag_leffler(spec.alpha, 1.0, t_alpha * arg_shrink);
    const double log_bound = std::log(grow.value) +
                             std::log(std::max(shrink.value, 1e-300)) -
                             theta * x;
    best = std::min(best, std::exp(log_bound));
  }
  return best;
}

TailEstimate tail_asymptote(const ProcessSpec& spec, double t, double x,
                            const PmfOptions& opt) {
  spec.validate();
  require_untempered(spec, "tail_asymptote");
  if (!(spec.beta < 1.0))
    throw std::domain_error("tail_asymptote: beta must be in (0,1)");
  if (!(x > 0.0)) throw std::domain_error("tail_asymptote: x must be > 0");
  if (!(t > 0.0)) throw std::domain_error("tail_asymptote: t must be > 0");

  TailEstimate est;
  est.x = x;
  const double c_up = std::pow(spec.up.weighted_total(), spec.beta) *
                      std::pow(t, spec.alpha) *
                      reciprocal_gamma(1.0 - spec.beta) *
                      reciprocal_gamma(spec.alpha + 1.0);
  if (spec.family == Family::counting) {
    est.asymptote = c_up * std::pow(x, -spec.beta);
    return est;
  }

  // Skellam: weight the shifted counting asymptote (x+y)^{-beta} by the
  // down-side pmf and truncate the y series with a reported bound. k = 1
  // uses the scalar table directly; k > 1 goes through the composition
  // pmf and therefore caps the series length.
  long double series = 0.0L;
  long double mass = 0.0L;
  std::size_t y_max;
  if (spec.k() == 1) {
    y_max = 20000;
  } else if (spec.k() <= 3) {
    y_max = 400;
  } else {
    y_max = 120;
  }
  ProcessSpec down = ProcessSpec::counting(spec.alpha, spec.beta,
                                           spec.down.rates);
  if (spec.k() == 1) {
    for (std::size_t y = 0; y < y_max; ++y) {
      const LdBounded p = stfpp_pmf_ld(spec.down.total(), spec.alpha,
                                       spec.beta, t, (long long)y,
                                       opt.method);
      series += powl((long double)(x + y), -(long double)spec.beta) * p.v;
      mass += p.v;
      if (1.0L - mass < 1e-12L) break;
    }
  } else {
    const PmfWindow w =
        counting_window(down, t, 0, static_cast<long long>(y_max) - 1, opt);
    for (std::size_t y = 0; y < w.values.size(); ++y) {
      series += powl((long double)(x + (double)y), -(long double)spec.beta) *
                (long double)w.values[y].probability;
      mass += w.values[y].probability;
    }
  }
  long double rem = 1.0L - mass;
  if (rem < 0.0L) rem = 0.0L;
  est.asymptote = c_up * static_cast<double>(series);
  est.truncation_bound =
      c_up * static_cast<double>(rem) *
      std::pow(x + static_cast<double>(y_max), -spec.beta);
  if (spec.beta > 0.5) est.upper_bound = tail_upper_bound(spec, t, x);
  return est;
}

BoundedReal arrival_time_cdf(const ProcessSpec& spec, double t, long long n,
                             const PmfOptions& opt) {
  spec.validate();
  require_untempered(spec, "arrival_time_cdf");
  if (spec.family != Family::skellam)
    throw std::invalid_argument("arrival_time_cdf: skellam family required");
  if (t < 0.0) throw std::domain_error("arrival_time_cdf: t < 0");

  const long long w = default_window(spec, t);
  const long long hi = std::max(n + 4, w);
  BoundedReal out;
  const PmfWindow win = pmf_window(spec, t, n, hi, opt);
  out.value = win.sum;
  out.bound = win.bound_sum +
              tail_mass_estimate(spec, t, static_cast<double>(hi), true);
  out.converged = win.converged;
  return out;
}

BoundedReal first_passage_survival(const ProcessSpec& spec, double t,
                                   long long n, PassageConvention convention,
                                   const PmfOptions& opt) {
  spec.validate();
  require_untempered(spec, "first_passage_survival");
  if (spec.family != Family::skellam)
    throw std::invalid_argument("first_passage_survival: skellam family required");
  if (n < 1) throw std::domain_error("first_passage_survival: n must be >= 1");

  BoundedReal out;
  if (convention == PassageConvention::as_stated) {
    const PmfWindow win = pmf_window(spec, t, 0, n - 1, opt);
    out.value = win.sum;
    out.bound = win.bound_sum;
    out.converged = win.converged;
    return out;
  }
  const long long w = default_window(spec, t);
  const long long lo = std::min(n - 1, -w);
  const PmfWindow win = pmf_window(spec, t, lo, n - 1, opt);
  out.value = win.sum;
  out.bound = win.bound_sum +
              tail_mass_estimate(spec, t, static_cast<double>(-lo), false);
  out.converged = win.converged;
  return out;
}

PmfResult increment_pmf_gsfcp(const RateVector& up_rates, double beta, double t,
                              double v, long long n, const PmfOptions& opt) {
  up_rates.validate();
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("increment_pmf_gsfcp: beta must be in (0,1]");
  if (t < 0.0 || v < 0.0)
    throw std::domain_error("increment_pmf_gsfcp: t, v must be >= 0");
  if (n < 0) throw std::domain_error("increment_pmf_gsfcp: n < 0");

  const ProcessSpec spec = ProcessSpec::counting(1.0, beta, up_rates.rates);
  const PmfResult factor1 = gstfcp_pmf(spec, t, n, opt);
  if (v == 0.0) return factor1;  // only y = 0 survives in the second factor

  // sum_y (Lambda^y / y!) (-d/dLambda)^y e^{-Lambda^beta v}: the pmf of the
  // alpha=1 process at elapsed time v summed over all states, so it equals
  // 1; the truncated partial sum carries its tail as the bound.
  const double lambda_total = up_rates.total();
  long double mass = 0.0L, bmass = 0.0L;
  std::size_t y_cap = std::min<std::size_t>(opt.y_cap, 40000);
  for (std::size_t y = 0; y < y_cap; ++y) {
    const LdBounded p =
        stfpp_pmf_ld(lambda_total, 1.0, beta, v, (long long)y, opt.method);
    mass += p.v;
    bmass += p.b;
    if (1.0L - mass < (long double)opt.tol) break;
  }
  long double rem = 1.0L - mass;
  if (rem < 0.0L) rem = 0.0L;

  PmfResult out;
  out.n = n;
  out.probability = static_cast<double>(factor1.probability * mass);
  out.truncation_bound = static_cast<double>(
      factor1.probability * (rem + bmass) +
      factor1.truncation_bound * (mass + rem + bmass));
  out.converged = factor1.converged;
  return out;
}

double recurrence_residual(const ProcessSpec& spec, double t, long long n,
                           const PmfOptions& opt) {
  spec.validate();
  require_untempered(spec, "recurrence_residual");
  if (spec.beta != 1.0)
    throw std::invalid_argument("recurrence_residual: requires beta = 1");
  if (n < 1) throw std::domain_error("recurrence_residual: n must be >= 1");

  const long long k = static_cast<long long>(spec.k());
  auto pmf_at = [&](long long x) -> double {
    if (spec.family == Family::counting)
      return x < 0 ? 0.0 : gstfcp_pmf(spec, t, x, opt).probability;
    return gstfsp_pmf(spec, t, x, opt).probability;
  };

  const double lhs = pmf_at(n);
  double rhs = 0.0;
  for (long long j = 1; j <= k; ++j) {
    rhs += static_cast<double>(j) * spec.up.rates[j - 1] * pmf_at(n - j);
    if (spec.family == Family::skellam)
      rhs -= static_cast<double>(j) * spec.down.rates[j - 1] * pmf_at(n + j);
  }
  rhs *= t / static_cast<double>(n);
  return std::fabs(lhs - rhs);
}

CharFnResult running_avg_charfn(const ProcessSpec& spec, double t, double u) {
  spec.validate();
  require_untempered(spec, "running_avg_charfn");
  if (spec.alpha != 1.0)
    throw std::invalid_argument(
        "running_avg_charfn: alpha = 1 required (the time-fractional process "
        "is not Levy)");
  if (!(t > 0.0)) throw std::domain_error("running_avg_charfn: t must be > 0");

  CharFnResult out;
  if (u == 0.0) return out;

  auto levy_symbol = [&](double z) {
    std::complex<double> up(0.0, 0.0);
    std::complex<double> dn(0.0, 0.0);
    for (std::size_t j = 0; j < spec.k(); ++j) {
      const double w = u * z * double(j + 1);
      up += spec.up.rates[j] * std::complex<double>(1.0 - std::cos(w), -std::sin(w));
      if (spec.family == Family::skellam)
        dn += spec.down.rates[j] *
              std::complex<double>(1.0 - std::cos(w), std::sin(w));
    }
    std::complex<double> s = std::pow(up, spec.beta);
    if (spec.family == Family::skellam) s += std::pow(dn, spec.beta);
    return s;
  };

  QuadOptions qopt;
  qopt.abs_tol = 1e-12;
  qopt.rel_tol = 1e-10;
  const auto quad = integrate_complex(levy_symbol, 0.0, 1.0, qopt);
  out.value = std::exp(-t * quad.value);
  out.quad_error = t * quad.error * std::abs(out.value);
  out.converged = quad.converged;
  return out;
}

double tail_upper_bound(const ProcessSpec& spec, double t, double x) {
  spec.validate();
  require_untempered(spec, "tail_upper_bound");
  if (spec.family != Family::skellam)
    throw std::invalid_argument("tail_upper_bound: skellam family required");
  if (!(spec.beta > 0.5 && spec.beta < 1.0))
    throw std::domain_error(
        "tail_upper_bound: requires beta in (1/2, 1) (Gamma(2 beta - 1) pole)");
  if (!(x > 0.0)) throw std::domain_error("tail_upper_bound: x must be > 0");
  const double rga1 = reciprocal_gamma(spec.alpha + 1.0);
  return std::pow(t, 2.0 * spec.alpha) * std::pow(x, 1.0 - 2.0 * spec.beta) *
         std::tgamma(2.0 * spec.beta - 1.0) *
         std::pow(spec.up.weighted_total(), spec.beta) *
         std::pow(spec.down.weighted_total(), spec.beta) *
         reciprocal_gamma(1.0 - spec.beta) * rga1 * rga1 *
         reciprocal_gamma(spec.beta);
}

}  // namespace fracskellam
