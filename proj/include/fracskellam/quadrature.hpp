#pragma once

#include <complex>
#include <functional>

namespace fracskellam {

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

template <typename T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive Gauss-Kronrod 15(7) on a finite interval.
QuadResult<double> integrate(const std::function<double(double)>& f, double a,
                             double b, const QuadOptions& opt = QuadOptions{});

QuadResult<std::complex<double>> integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadOptions& opt = QuadOptions{});

}  // namespace fracskellam
