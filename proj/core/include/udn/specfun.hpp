#pragma once

#include <functional>
#include <stdexcept>

namespace udn {

/// Tolerances for the adaptive quadrature engine.
struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
};

/// Raised when adaptive quadrature cannot reach the requested tolerance.
/// Carries the best available estimate and a bound on its error so callers
/// can decide whether to proceed anyway.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate,
                   double error_bound)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_bound_(error_bound) {}

  double best_estimate() const { return best_estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// Gauss hypergeometric family F(b, z) = 2F1(1, b; 1+b; -z) for b > 0 and
/// z >= 0. Equals b * Integral[0,1] t^(b-1) / (1 + z t) dt. Strictly
/// decreasing in z with F(b, 0) = 1.
double hyp_F(double b, double z);

/// Adaptive Gauss-Kronrod (7/15) integration of f over [lo, hi]. hi may be
/// +infinity, in which case the tail is folded onto a finite interval by the
/// substitution x = lo + t/(1-t). Throws ConvergenceError when the requested
/// tolerance is not reached within spec.max_subdivisions bisections.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

}  // namespace udn
