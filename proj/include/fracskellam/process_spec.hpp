#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracskellam {

/// Jump-size rates (lambda_1, ..., lambda_k): rate lambda_j for jumps of
/// size j. All entries non-negative, at least one positive.
struct RateVector {
  std::vector<double> rates;

  RateVector() = default;
  explicit RateVector(std::vector<double> r) : rates(std::move(r)) {}

  std::size_t k() const { return rates.size(); }

  double total() const {  // Lambda
    double s = 0.0;
    for (double r : rates) s += r;
    return s;
  }
  double weighted_total() const {  // sum_j j*lambda_j
    double s = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j) s += (j + 1) * rates[j];
    return s;
  }
  double weighted_sq_total() const {  // sum_j j^2*lambda_j
    double s = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j)
      s += double(j + 1) * double(j + 1) * rates[j];
    return s;
  }

  void validate() const {
    if (rates.empty()) throw std::invalid_argument("RateVector: empty");
    bool any = false;
    for (double r : rates) {
      if (r < 0.0 || !std::isfinite(r))
        throw std::invalid_argument("RateVector: rates must be finite and >= 0");
      if (r > 0.0) any = true;
    }
    if (!any) throw std::invalid_argument("RateVector: all rates zero");
  }
};

enum class Family { counting, skellam };

/// The parameter object shared by every operation: fractional indices,
/// tempering, and the jump rates. alpha=beta=1, theta=0 is the classical
/// (non-fractional) case; k=1 gives the Poisson/Skellam reductions.
///
/// `shared_clock` selects the skellam construction, which matters once the
/// time change is random (beta < 1, or alpha < 1 at second order): with a
/// shared clock the up and down streams ride one subordinator,
/// S(D(Y(t))); with independent clocks the process is the difference of
/// two independent time-changed counting processes, which is the law the
/// closed-form pmf/pgf factorizations describe. The two laws genuinely
/// differ; samplers honor the flag and analytic formulas always mean the
/// independent-clock law.
struct ProcessSpec {
  Family family = Family::counting;
  double alpha = 1.0;  // time index, (0,1]
  double beta = 1.0;   // space index, (0,1]
  double theta = 0.0;  // tempering, 0 = untempered
  bool shared_clock = true;
  RateVector up;       // lambda
  RateVector down;     // mu, skellam only

  std::size_t k() const { return up.k(); }
  bool tempered() const { return theta > 0.0; }

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("ProcessSpec: alpha must be in (0,1]");
    if (!(beta > 0.0 && beta <= 1.0))
      throw std::invalid_argument("ProcessSpec: beta must be in (0,1]");
    if (theta < 0.0 || !std::isfinite(theta))
      throw std::invalid_argument("ProcessSpec: theta must be >= 0");
    up.validate();
    if (family == Family::skellam) {
      down.validate();
      if (down.k() != up.k())
        throw std::invalid_argument(
            "ProcessSpec: skellam family needs equal k for up/down rates");
    } else if (!down.rates.empty()) {
      throw std::invalid_argument("ProcessSpec: counting family takes no down rates");
    }
  }

  static ProcessSpec counting(double alpha, double beta, std::vector<double> lambda,
                              double theta = 0.0) {
    ProcessSpec s;
    s.family = Family::counting;
    s.alpha = alpha;
    s.beta = beta;
    s.theta = theta;
    s.up = RateVector(std::move(lambda));
    s.validate();
    return s;
  }
  static ProcessSpec skellam(double alpha, double beta, std::vector<double> lambda,
                             std::vector<double> mu, double theta = 0.0) {
    ProcessSpec s;
    s.family = Family::skellam;
    s.alpha = alpha;
    s.beta = beta;
    s.theta = theta;
    s.up = RateVector(std::move(lambda));
    s.down = RateVector(std::move(mu));
    s.validate();
    return s;
  }

  /// Spec with up and down rates exchanged (negates a skellam process).
  ProcessSpec swapped() const {
    ProcessSpec s = *this;
    std::swap(s.up, s.down);
    return s;
  }

  ProcessSpec with_shared_clock(bool shared) const {
    ProcessSpec s = *this;
    s.shared_clock = shared;
    return s;
  }
};

}  // namespace fracskellam
