#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fracskellam/analytics.hpp"
#include "fracskellam/processes.hpp"
#include "fracskellam/rng.hpp"
#include "fracskellam/special_functions.hpp"

using namespace fracskellam;

namespace {

// Brute-force Skellam pmf: sum_y (l)^{|n|+y} (m)^y e^{-(l+m)} / ((|n|+y)! y!)
// with l = lambda*t, m = mu*t.
double skellam_oracle(double l, double m, long long n) {
  if (n < 0) {
    std::swap(l, m);
    n = -n;
  }
  long double sum = 0.0L;
  for (int y = 0; y < 600; ++y) {
    const long double lg = (n + y) * logl((long double)l) -
                           lgammal((long double)(n + y + 1)) +
                           y * logl((long double)m) - lgammal((long double)(y + 1));
    sum += expl(lg);
  }
  return static_cast<double>(sum * expl(-(long double)(l + m)));
}

double poisson_oracle(double lt, long long n) {
  return std::exp(n * std::log(lt) - std::lgamma(double(n + 1)) - lt);
}

}  // namespace

TEST_CASE("gstfsp_pmf degenerates to the Skellam closed form") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (double mu : {0.5, 1.0, 2.0}) {
      auto spec = ProcessSpec::skellam(1, 1, {lambda}, {mu});
      for (long long n = -10; n <= 10; ++n) {
        const PmfResult p = gstfsp_pmf(spec, 1.0, n);
        CHECK(std::fabs(p.probability - skellam_oracle(lambda, mu, n)) < 1e-10);
      }
    }
  }
}

TEST_CASE("gstfcp_pmf degenerates to the Poisson closed form") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    auto spec = ProcessSpec::counting(1, 1, {lambda});
    for (long long n = 0; n <= 10; ++n) {
      CHECK(std::fabs(gstfcp_pmf(spec, 1.0, n).probability -
                      poisson_oracle(lambda, n)) < 1e-10);
    }
  }
  auto spec = ProcessSpec::counting(1, 1, {2.0});
  CHECK(gstfcp_pmf(spec, 1.0, 3).probability ==
        doctest::Approx(0.180447044).epsilon(1e-8));
}

TEST_CASE("pmf at t=0 is a point mass at zero") {
  auto spec = ProcessSpec::skellam(0.7, 0.6, {1.0, 2.0}, {2.0, 1.0});
  CHECK(gstfsp_pmf(spec, 0.0, 0).probability == 1.0);
  CHECK(gstfsp_pmf(spec, 0.0, 3).probability == 0.0);
  CHECK(gstfsp_pmf(spec, 0.0, -1).probability == 0.0);
}

TEST_CASE("gstfsp_pmf swap symmetry is exact") {
  auto spec = ProcessSpec::skellam(0.6, 0.7, {0.5, 1.5}, {2.0, 0.5});
  const auto swapped = spec.swapped();
  PmfOptions opt;
  opt.tol = 1e-7;
  const PmfWindow a = pmf_window(spec, 1.0, -5, 5, opt);
  const PmfWindow b = pmf_window(swapped, 1.0, -5, 5, opt);
  for (long long n : {-4LL, -1LL, 0LL, 2LL, 5LL}) {
    CHECK(a.at(n).probability == b.at(-n).probability);
  }
}

TEST_CASE("gstfcp_pmf n=0 equals the Mittag-Leffler value") {
  auto spec = ProcessSpec::counting(0.7, 0.4, {1.0, 2.0});
  const double want =
      mittag_leffler(0.7, 1.0, -std::pow(3.0, 0.4)).value;
  CHECK(gstfcp_pmf(spec, 1.0, 0).probability ==
        doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(gstfcp_pmf(spec, 1.0, -1), std::domain_error);
}

TEST_CASE("gstfcp_pmf matches the symbolic space-fractional value") {
  // alpha=1, beta=0.5, k=1, lambda=1, t=1, n=1:
  // lambda * (-d/dlambda) e^{-sqrt(lambda) t} = (t sqrt(l)/2) e^{-sqrt(l) t}.
  auto spec = ProcessSpec::counting(1, 0.5, {1.0});
  CHECK(gstfcp_pmf(spec, 1.0, 1).probability ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("skellam pmf for k>1 is the convolution of the counting laws") {
  // Cross-check against a direct convolution of the two composition-based
  // counting pmfs (independent-clock law).
  auto spec = ProcessSpec::skellam(1, 1, {0.5, 1.0}, {1.0, 0.25});
  auto up = ProcessSpec::counting(1, 1, {0.5, 1.0});
  auto down = ProcessSpec::counting(1, 1, {1.0, 0.25});
  std::vector<double> pu(160), pd(160);
  for (int v = 0; v < 160; ++v) {
    pu[v] = gstfcp_pmf(up, 1.0, v).probability;
    pd[v] = gstfcp_pmf(down, 1.0, v).probability;
  }
  for (long long n : {-5LL, -1LL, 0LL, 2LL, 6LL}) {
    long double conv = 0.0L;
    for (int m = 0; m + std::llabs(n) < 160; ++m)
      conv += (n >= 0 ? pu[m + n] * pd[m] : pd[m - n] * pu[m]);
    const PmfResult got = gstfsp_pmf(spec, 1.0, n);
    CHECK(std::fabs(got.probability - double(conv)) < 1e-10);
  }

  // Fractional indices: same cross-check at k=2, beta<1 (heavier tails,
  // truncated convolution oracle built from composition-based windows).
  auto fspec = ProcessSpec::skellam(1, 0.7, {0.5, 1.0}, {1.0, 0.25});
  auto fup = ProcessSpec::counting(1, 0.7, {0.5, 1.0});
  auto fdown = ProcessSpec::counting(1, 0.7, {1.0, 0.25});
  PmfOptions fopt;
  fopt.tol = 1e-6;
  const PmfWindow wu = pmf_window(fup, 1.0, 0, 1199, fopt);
  const PmfWindow wd = pmf_window(fdown, 1.0, 0, 1199, fopt);
  const PmfWindow ws = pmf_window(fspec, 1.0, -4, 4, fopt);
  for (long long n : {0LL, 3LL, -4LL}) {
    long double conv = 0.0L;
    for (int m = 0; m + std::llabs(n) < 1200; ++m)
      conv += (n >= 0 ? wu.at(m + n).probability * wd.at(m).probability
                      : wd.at(m - n).probability * wu.at(m).probability);
    CHECK(std::fabs(ws.at(n).probability - double(conv)) < 1e-4);
  }
}

TEST_CASE("printed k>1 cross-collapse is not the weighted law") {
  // With lambda = (0,1) every up-jump has size 2, so odd states carry no
  // mass; the event-count collapse (scalar rates Lambda, T) puts mass
  // there anyway. The corrected pmf must see the parity.
  auto spec = ProcessSpec::skellam(1, 1, {0.0, 1.0}, {0.0, 0.5});
  CHECK(gstfsp_pmf(spec, 1.0, 1).probability < 1e-12);
  CHECK(gstfsp_pmf(spec, 1.0, 2).probability > 0.01);

  // The naive collapse for the same spec: sum_y L^{1+y} T^y / ((1+y)! y!)
  // D_L(1+y) D_T(y) with scalar rates L = 1, T = 0.5; nonzero at n = 1.
  long double naive = 0.0L;
  const double l = 1.0, mt = 0.5;  // Lambda*t, T*t at t = 1
  for (int yy = 0; yy < 200; ++yy)
    naive += expl((1 + yy) * logl((long double)l) -
                  lgammal((long double)(yy + 2)) + yy * logl((long double)mt) -
                  lgammal((long double)(yy + 1)));
  naive *= expl(-(long double)(l + mt));
  CHECK(double(naive) > 0.1);
}

TEST_CASE("dual evaluation methods agree within combined bounds") {
  PmfOptions thm;
  thm.method = PmfMethod::theorem31;
  thm.tol = 1e-8;
  PmfOptions rmk;
  rmk.method = PmfMethod::remark32;
  rmk.tol = 1e-8;
  // Representative subset (the acceptance suite runs the full grid).
  struct Case {
    double alpha, beta;
    int k;
  };
  for (const Case& cs : {Case{0.5, 0.5, 1}, Case{0.7, 0.7, 1},
                         Case{0.7, 0.7, 3}}) {
    std::vector<double> lambda(cs.k, 1.0), mu(cs.k, 1.0);
    lambda[0] = 1.5;
    auto spec = ProcessSpec::skellam(cs.alpha, cs.beta, lambda, mu);
    const PmfWindow a = pmf_window(spec, 1.0, -15, 15, thm);
    const PmfWindow b = pmf_window(spec, 1.0, -15, 15, rmk);
    for (long long n = -15; n <= 15; ++n) {
      const auto& pa = a.at(n);
      const auto& pb = b.at(n);
      CHECK(std::fabs(pa.probability - pb.probability) <=
            pa.truncation_bound + pb.truncation_bound + 1e-13);
    }
  }
}

TEST_CASE("normalization over the tail-bounded window") {
  // beta < 1: heavy tails leave real mass outside any desk-size window;
  // the tail estimate must account for the deficit within a modest factor.
  // (The full acceptance grid runs in the acceptance suite; this covers a
  // representative subset.)
  struct Case {
    double alpha, beta;
    int k;
  };
  for (const Case& cs : {Case{0.5, 0.5, 1}, Case{0.7, 0.5, 1},
                         Case{1.0, 0.7, 1}, Case{0.7, 0.7, 3}}) {
    std::vector<double> rates(cs.k, 1.0);
    auto spec = ProcessSpec::skellam(cs.alpha, cs.beta, rates, rates);
    PmfOptions opt;
    opt.tol = 8e-9;
    const long long w = default_window(spec, 1.0);
    const PmfWindow win = pmf_window(spec, 1.0, -w, w, opt);
    CHECK(win.converged);
    CHECK(win.bound_sum < 1e-6);
    CHECK(win.sum <= 1.0 + win.bound_sum);
    const double outside = tail_mass_estimate(spec, 1.0, double(w), true) +
                           tail_mass_estimate(spec, 1.0, double(w), false);
    CHECK(win.sum + outside > 1.0 - win.bound_sum - 0.5 * outside);
    CHECK(1.0 - win.sum < 3.0 * outside + win.bound_sum);
  }
  // beta = 1: moments exist, the window is mean +- 10 sd and the Chernoff
  // remainder certifies normalization to ~1e-6.
  for (double alpha : {0.5, 1.0}) {
    auto spec = ProcessSpec::skellam(alpha, 1.0, {1.0, 0.5}, {0.5, 0.5});
    PmfOptions opt;
    opt.tol = 1e-10;
    const long long w = default_window(spec, 1.0);
    const PmfWindow win = pmf_window(spec, 1.0, -w, w, opt);
    const double outside = tail_mass_estimate(spec, 1.0, double(w), true) +
                           tail_mass_estimate(spec, 1.0, double(w), false);
    CHECK(std::fabs(win.sum - 1.0) < win.bound_sum + outside + 1e-9);
  }
}

TEST_CASE("pgf closed forms and consistency") {
  auto spec = ProcessSpec::skellam(1, 1, {1.0}, {1.0});
  CHECK(gstfsp_pgf(spec, 1.0, 1.0) == 1.0);
  // exp{-t[(1-u) lambda + (1-1/u) mu]} at u=0.5: e^{0.5}.
  CHECK(gstfsp_pgf(spec, 1.0, 0.5) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-12));

  // Series consistency: sum u^n pmf(n) for the beta=1 fractional family.
  auto gfsp = ProcessSpec::skellam(0.6, 1.0, {1.0}, {1.0});
  const double u = 0.8;
  const PmfWindow w = pmf_window(gfsp, 1.0, -60, 60);
  long double series_sum = 0.0L;
  for (const auto& p : w.values)
    series_sum += p.probability * std::pow(u, double(p.n));
  CHECK(static_cast<double>(series_sum) ==
        doctest::Approx(gstfsp_pgf(gfsp, 1.0, u)).epsilon(1e-7));
}

TEST_CASE("pgf rejects the complex-branch region") {
  auto spec = ProcessSpec::skellam(0.6, 0.7, {1.0}, {1.0});
  CHECK_THROWS_AS(gstfsp_pgf(spec, 1.0, 0.5), std::domain_error);
  CHECK(gstfsp_pgf(spec, 1.0, 1.0) == 1.0);  // u=1 stays defined
  // Counting family stays real for beta < 1.
  auto counting = ProcessSpec::counting(0.6, 0.7, {1.0});
  CHECK(gstfsp_pgf(counting, 1.0, 0.5) > 0.0);
}

TEST_CASE("moments closed forms") {
  auto gsp = ProcessSpec::skellam(1, 1, {2.0}, {1.0});
  const MomentSet m1 = moments(gsp, 3.0);
  CHECK(m1.mean == doctest::Approx(3.0));
  CHECK(m1.variance == doctest::Approx(9.0));  // t*(lambda+mu)
  CHECK(m1.covariance(1.0, 2.0) == doctest::Approx(3.0));  // (l+m)*min(s,t)

  auto gfsp = ProcessSpec::skellam(0.5, 1.0, {2.0}, {1.0});
  const MomentSet m2 = moments(gfsp, 1.0);
  CHECK(m2.mean == doctest::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
  CHECK_THROWS_AS(m2.covariance(1.0, 2.0), std::logic_error);

  auto gcp = ProcessSpec::counting(1, 1, {1.0, 1.0});
  const MomentSet m3 = moments(gcp, 1.0);
  CHECK(m3.variance == doctest::Approx(5.0));  // sum j^2 lambda_j

  auto frac = ProcessSpec::skellam(1, 0.7, {1.0}, {1.0});
  CHECK_THROWS_AS(moments(frac, 1.0), std::invalid_argument);
}

TEST_CASE("moments match the pgf derivative at u=1") {
  auto spec = ProcessSpec::skellam(0.7, 1.0, {1.0, 0.5}, {0.5, 0.25});
  const MomentSet m = moments(spec, 1.0);
  const double h = 1e-5;
  const double dpgf =
      (gstfsp_pgf(spec, 1.0, 1.0) - gstfsp_pgf(spec, 1.0, 1.0 - h)) / h;
  CHECK(std::fabs(dpgf - m.mean) / std::max(1.0, std::fabs(m.mean)) < 1e-4);
}

TEST_CASE("fractional moment of the Poisson process") {
  auto gcp = ProcessSpec::counting(1, 1, {1.0});
  const FracMomentResult r = fractional_moment(gcp, 1.0, 0.5);
  CHECK(r.converged);
  // Direct-sum oracle sum sqrt(n) e^{-1} / n!.
  long double oracle = 0.0L;
  for (int n = 1; n <= 30; ++n)
    oracle += sqrtl((long double)n) * expl(-1.0L - lgammal((long double)n + 1));
  CHECK(std::fabs(r.value - double(oracle)) / double(oracle) < 0.005);
  CHECK(r.value == doctest::Approx(0.773).epsilon(0.01));

  // q -> 1 approaches the mean.
  const FracMomentResult r99 = fractional_moment(gcp, 1.0, 0.99);
  long double near_mean = 0.0L;
  for (int n = 1; n <= 40; ++n)
    near_mean +=
        powl((long double)n, 0.99L) * expl(-1.0L - lgammal((long double)n + 1));
  CHECK(std::fabs(r99.value - double(near_mean)) / double(near_mean) < 0.02);
}

TEST_CASE("fractional moment flags the divergent q >= beta region") {
  auto gsfcp = ProcessSpec::counting(1, 0.5, {1.0});
  const FracMomentResult r = fractional_moment(gsfcp, 1.0, 0.5);
  CHECK_FALSE(r.converged);
  CHECK(std::isinf(r.value));
}

TEST_CASE("fractional moment of GSFCP matches Monte Carlo below beta") {
  auto gsfcp = ProcessSpec::counting(1, 0.5, {1.0});
  const double q = 0.2;
  const FracMomentResult r = fractional_moment(gsfcp, 1.0, q);
  CHECK(r.converged);
  RngStream rng(31, 0);
  const std::size_t n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(process_endpoint(gsfcp, 1.0, rng));
    const double xq = std::pow(x, q);
    sum += xq;
    sum2 += xq * xq;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::fabs(r.value - mean) < 3.0 * se + r.abs_error);
}

TEST_CASE("arrival_time_cdf against the brute-force Skellam sum") {
  auto spec = ProcessSpec::skellam(1, 1, {1.0}, {1.0});
  const BoundedReal f1 = arrival_time_cdf(spec, 1.0, 1);
  long double oracle = 0.0L;
  for (long long x = 1; x <= 60; ++x) oracle += skellam_oracle(1.0, 1.0, x);
  CHECK(std::fabs(f1.value - double(oracle)) < f1.bound + 1e-10);
  CHECK(f1.value == doctest::Approx(0.345747).epsilon(1e-4));

  // Monotone in the level; total mass at the far-left edge.
  CHECK(arrival_time_cdf(spec, 1.0, 2).value < f1.value);
  CHECK(arrival_time_cdf(spec, 1.0, -60).value ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("first_passage_survival conventions") {
  auto spec = ProcessSpec::skellam(1, 1, {1.0}, {1.0});
  const BoundedReal as_stated =
      first_passage_survival(spec, 1.0, 1, PassageConvention::as_stated);
  CHECK(as_stated.value ==
        doctest::Approx(skellam_oracle(1.0, 1.0, 0)).epsilon(1e-10));

  const BoundedReal full =
      first_passage_survival(spec, 1.0, 1, PassageConvention::full_support);
  CHECK(full.value >= as_stated.value);
  // P(S < 1) = 1 - P(S >= 1).
  CHECK(full.value == doctest::Approx(1.0 - 0.345747).epsilon(1e-3));
  CHECK_THROWS_AS(
      first_passage_survival(spec, 1.0, 0, PassageConvention::as_stated),
      std::domain_error);
}

TEST_CASE("increment pmf reduces to the pmf at v=0 and is v-invariant") {
  const RateVector rates({1.0, 1.0});
  PmfOptions opt;
  opt.tol = 1e-9;
  const PmfResult base = increment_pmf_gsfcp(rates, 0.7, 1.0, 0.0, 2, opt);
  auto spec = ProcessSpec::counting(1, 0.7, {1.0, 1.0});
  CHECK(base.probability == gstfcp_pmf(spec, 1.0, 2, opt).probability);

  for (double v : {1.0, 2.0}) {
    const PmfResult shifted = increment_pmf_gsfcp(rates, 0.7, 1.0, v, 2, opt);
    CHECK(std::fabs(shifted.probability - base.probability) <=
          shifted.truncation_bound + base.truncation_bound);
  }

  // beta = 1, k = 1: plain Poisson increment.
  const RateVector single({1.0});
  const PmfResult pois = increment_pmf_gsfcp(single, 1.0, 1.0, 2.0, 0);
  CHECK(pois.probability == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("recurrence residuals vanish for GSP and GCP") {
  auto gsp = ProcessSpec::skellam(1, 1, {2.0}, {1.0});
  for (long long n = 1; n <= 10; ++n)
    CHECK(recurrence_residual(gsp, 1.0, n) < 1e-8);

  auto gcp = ProcessSpec::counting(1, 1, {1.0, 1.0});
  for (long long n = 1; n <= 10; ++n)
    CHECK(recurrence_residual(gcp, 1.0, n) < 1e-8);
}

TEST_CASE("recurrence residual is genuinely nonzero for alpha < 1") {
  // The alpha < 1 extension printed alongside the alpha = 1 relations does
  // not hold; the residual detector must see it.
  auto tfpp = ProcessSpec::counting(0.5, 1.0, {1.0});
  CHECK(recurrence_residual(tfpp, 1.0, 1) > 0.05);
}

TEST_CASE("tail asymptote closed forms") {
  auto counting = ProcessSpec::counting(0.5, 0.5, {1.0});
  const TailEstimate e = tail_asymptote(counting, 1.0, 100.0);
  // x^{-b} (sum j l)^b t^a / (Gamma(1-b) Gamma(a+1)), Gamma(.5)Gamma(1.5)=pi/2.
  CHECK(e.asymptote == doctest::Approx(0.1 / (M_PI / 2.0)).epsilon(1e-10));
  CHECK(e.asymptote == doctest::Approx(0.063662).epsilon(1e-4));
  CHECK_FALSE(e.upper_bound.has_value());

  const TailEstimate far = tail_asymptote(counting, 1.0, 400.0);
  CHECK(far.asymptote < e.asymptote);
}

TEST_CASE("skellam tail asymptote series and upper bound") {
  auto spec = ProcessSpec::skellam(0.5, 0.75, {1.0}, {1.0});
  const TailEstimate e = tail_asymptote(spec, 1.0, 100.0);
  CHECK(e.asymptote > 0.0);
  CHECK(e.upper_bound.has_value());
  CHECK(*e.upper_bound > e.asymptote);  // bound dominates the asymptote

  const double b = tail_upper_bound(spec, 1.0, 100.0);
  const double gamma_half = std::sqrt(M_PI);
  const double want = 1.0 * std::pow(100.0, -0.5) * std::tgamma(0.5) /
                      (std::tgamma(0.25) * std::pow(std::tgamma(1.5), 2) *
                       std::tgamma(0.75));
  CHECK(b == doctest::Approx(want).epsilon(1e-10));
  (void)gamma_half;

  CHECK(tail_upper_bound(spec, 1.0, 400.0) < b);  // decreasing in x
  auto low = ProcessSpec::skellam(0.5, 0.5, {1.0}, {1.0});
  CHECK_THROWS_AS(tail_upper_bound(low, 1.0, 100.0), std::domain_error);
}

TEST_CASE("running average characteristic function basics") {
  auto spec = ProcessSpec::skellam(1, 0.7, {1.0, 0.5}, {0.5, 1.0});
  const CharFnResult at0 = running_avg_charfn(spec, 1.0, 0.0);
  CHECK(at0.value == std::complex<double>(1.0, 0.0));

  const CharFnResult plus = running_avg_charfn(spec, 1.0, 1.3);
  const CharFnResult minus = running_avg_charfn(spec, 1.0, -1.3);
  CHECK(std::abs(plus.value - std::conj(minus.value)) < 1e-10);
  CHECK(std::abs(plus.value) <= 1.0 + 1e-12);

  auto fractional = ProcessSpec::skellam(0.6, 0.7, {1.0}, {1.0});
  CHECK_THROWS_AS(running_avg_charfn(fractional, 1.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("running average characteristic function, beta=1 closed form") {
  // For a plain GSP the z-integral is elementary:
  // Int_0^1 (1 - e^{iuzj}) dz = 1 - (e^{iuj} - 1)/(iuj).
  auto spec = ProcessSpec::skellam(1, 1, {1.0, 0.5}, {0.75, 0.25});
  const double u = 0.9, t = 1.3;
  std::complex<double> sum(0.0, 0.0);
  for (int j = 1; j <= 2; ++j) {
    const std::complex<double> iuj(0.0, u * j);
    const double lam = spec.up.rates[j - 1];
    const double mu = spec.down.rates[j - 1];
    sum += lam * (1.0 - (std::exp(iuj) - 1.0) / iuj);
    sum += mu * (1.0 - (std::exp(-iuj) - 1.0) / (-iuj));
  }
  const std::complex<double> want = std::exp(-t * sum);
  const CharFnResult got = running_avg_charfn(spec, t, u);
  CHECK(std::abs(got.value - want) < 1e-9);
}

TEST_CASE("default_window honors the moment rule for beta=1") {
  auto light = ProcessSpec::skellam(1, 1, {30.0}, {30.0});
  CHECK(default_window(light, 1.0) > 60);
  auto heavy = ProcessSpec::skellam(0.6, 0.7, {1.0}, {1.0});
  CHECK(default_window(heavy, 1.0) == 60);
}
