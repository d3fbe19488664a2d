#include "udn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace udn {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_bounded_dual_slope(const PathLossModel& model) {
  if (model.variant() != PathLossVariant::BoundedDualSlope) {
    throw std::domain_error(
        "operation requires a bounded dual slope path loss model");
  }
}

void check_threshold(double threshold) {
  if (!(std::isfinite(threshold) && threshold > 0.0)) {
    throw std::domain_error("SIR threshold must be finite and positive");
  }
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

// Exponentially decaying integrands concentrate all their mass within a few
// decay lengths of the left endpoint; when that layer is thinner than the
// first Kronrod node offset the adaptive pass sees only zeros and stops at
// zero with a zero error estimate. Pre-splitting from the left edge with
// doubling widths keeps the layer resolved no matter how long the interval.
double integrate_left_layer(const std::function<double(double)>& f, double lo,
                            double hi, double scale,
                            const QuadratureSpec& spec) {
  double total = 0.0;
  double a = lo;
  double width = std::max(scale, (hi - lo) * 1e-12);
  while (a < hi) {
    const double b = std::min(hi, a + width);
    total += integrate(f, a, b, spec);
    a = b;
    width *= 2.0;
  }
  return total;
}

// Power-law tails decay on a multiplicative scale; log-uniform panels give
// the adaptive pass one well-conditioned piece per octave.
double integrate_log_panels(const std::function<double(double)>& f, double lo,
                            double hi, const QuadratureSpec& spec) {
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    const double b = std::min(hi, 2.0 * a);
    total += integrate(f, a, b, spec);
    a = b;
  }
  return total;
}

}  // namespace

std::string_view to_string(CoverageMethod m) {
  switch (m) {
    case CoverageMethod::ExactIntegral:
      return "exact";
    case CoverageMethod::LowerBound:
      return "lower_bound";
    case CoverageMethod::UpperBound:
      return "upper_bound";
    case CoverageMethod::Asymptotic:
      return "asymptotic";
    case CoverageMethod::GeneralOracle:
      return "general";
    case CoverageMethod::MonteCarlo:
      return "montecarlo";
  }
  return "unknown";
}

void NetworkScenario::validate() const {
  if (!(std::isfinite(lambda_b) && lambda_b > 0.0)) {
    throw std::domain_error("lambda_b must be finite and positive");
  }
  if (std::isnan(lambda_u) || lambda_u < 0.0) {
    throw std::domain_error("lambda_u must be >= 0 (or +inf for full load)");
  }
  check_threshold(sir_threshold);
}

double active_probability(const NetworkScenario& scenario) {
  scenario.validate();
  if (scenario.is_full_load()) return 1.0;
  if (scenario.lambda_u == 0.0) return 0.0;
  const double ratio = scenario.lambda_u / (3.5 * scenario.lambda_b);
  return 1.0 - std::pow(1.0 + ratio, -3.5);
}

double interference_area(const PathLossModel& model, double threshold,
                         double x) {
  require_bounded_dual_slope(model);
  check_threshold(threshold);
  const double r_b = model.bounded_radius();
  const double r_c = model.critical_radius();
  if (!(x >= r_b && x <= r_c)) {
    throw std::domain_error(
        "interference_area requires r_b <= x <= r_c");
  }
  const double a_near = model.near_exponent();
  const double a_far = model.far_exponent();
  const double T = threshold;
  const double b_near = 2.0 / a_near;
  const double b_far = 1.0 - 2.0 / a_far;
  // Near-field interferers between the server and the critical distance,
  // minus the core exclusion, plus the exact power-law tail beyond r_c.
  const double near = r_c * r_c * hyp_F(b_near, std::pow(r_c / x, a_near) / T);
  const double core =
      r_b * r_b * (hyp_F(b_near, 1.0 / T) - T / (1.0 + T));
  const double tail = 2.0 * T * std::pow(x, a_near) *
                      std::pow(r_c, 2.0 - a_near) / (a_far - 2.0) *
                      hyp_F(b_far, T * std::pow(x / r_c, a_near));
  return near - core + tail;
}

double core_interference_area(const PathLossModel& model, double threshold) {
  require_bounded_dual_slope(model);
  check_threshold(threshold);
  const double r_b = model.bounded_radius();
  const double r_c = model.critical_radius();
  const double a_near = model.near_exponent();
  const double a_far = model.far_exponent();
  const double T = threshold;
  const double b_near = 2.0 / a_near;
  const double b_far = 1.0 - 2.0 / a_far;
  // Server inside the constant-gain core: unit-gain interferers up to r_b,
  // power-law ones between r_b and r_c, exact tail beyond r_c.
  const double core = r_b * r_b * T / (1.0 + T);
  const double near =
      r_c * r_c * hyp_F(b_near, std::pow(r_c, a_near) / T) -
      r_b * r_b * hyp_F(b_near, std::pow(r_b, a_near) / T);
  const double tail = 2.0 * T * std::pow(r_c, 2.0 - a_near) / (a_far - 2.0) *
                      hyp_F(b_far, T * std::pow(r_c, -a_near));
  return core + near + tail;
}

double interference_term_core(const PathLossModel& model, double threshold,
                              double r) {
  require_bounded_dual_slope(model);
  check_threshold(threshold);
  const double r_b = model.bounded_radius();
  if (!(r > 0.0 && r <= r_b * r_b)) {
    throw std::domain_error("core interference term requires 0 < r <= r_b^2");
  }
  return core_interference_area(model, threshold) / r -
         threshold / (1.0 + threshold);
}

double interference_term_near(const PathLossModel& model, double threshold,
                              double r) {
  require_bounded_dual_slope(model);
  check_threshold(threshold);
  const double r_b = model.bounded_radius();
  const double r_c = model.critical_radius();
  if (!(r >= r_b * r_b && r <= r_c * r_c)) {
    throw std::domain_error(
        "near interference term requires r_b^2 <= r <= r_c^2");
  }
  const double T = threshold;
  const double b_near = 2.0 / model.near_exponent();
  const double f_core = hyp_F(b_near, 1.0 / T);
  return (interference_area(model, T, std::sqrt(r)) +
          r_b * r_b * (f_core - T / (1.0 + T))) /
             r -
         f_core;
}

double interference_term_far(const PathLossModel& model, double threshold) {
  require_bounded_dual_slope(model);
  check_threshold(threshold);
  const double a_far = model.far_exponent();
  return 2.0 * threshold / (a_far - 2.0) *
         hyp_F(1.0 - 2.0 / a_far, threshold);
}

namespace {

// Shared pieces of the exact coverage expression and its bounds: the core
// and far serving regions integrate to closed exponential forms.
struct ClosedPieces {
  double first;      // serving distance inside the core
  double third;      // serving distance beyond the critical radius
  double h1, h3, core_area;
};

ClosedPieces closed_pieces(const PathLossModel& model,
                           const NetworkScenario& scenario) {
  const double T = scenario.sir_threshold;
  const double pa = active_probability(scenario);
  const double lb = scenario.lambda_b;
  const double r_b = model.bounded_radius();
  const double r_c = model.critical_radius();
  ClosedPieces p;
  p.core_area = core_interference_area(model, T);
  p.h1 = 1.0 - pa * T / (1.0 + T);
  p.h3 = 1.0 + pa * interference_term_far(model, T);
  p.first = (std::exp(-lb * pa * kPi * p.core_area) -
             std::exp(-lb * kPi * (r_b * r_b * p.h1 + pa * p.core_area))) /
            p.h1;
  p.third = std::exp(-lb * kPi * r_c * r_c * p.h3) / p.h3;
  return p;
}

}  // namespace

CoverageResult coverage_exact(const PathLossModel& model,
                              const NetworkScenario& scenario,
                              const QuadratureSpec& quad) {
  require_bounded_dual_slope(model);
  scenario.validate();
  const double T = scenario.sir_threshold;
  const double pa = active_probability(scenario);
  const double lb = scenario.lambda_b;
  const ClosedPieces pieces = closed_pieces(model, scenario);
  const double r_b2 = model.bounded_radius() * model.bounded_radius();
  const double r_c2 = model.critical_radius() * model.critical_radius();
  // steepest exponent slope over the near-field region sets the decay scale
  const double slope =
      1.0 + pa * (r_b2 < r_c2 ? interference_term_near(model, T, r_b2) : 0.0);
  const double middle =
      lb * kPi *
      integrate_left_layer(
          [&](double r) {
            return std::exp(
                -lb * kPi * r *
                (1.0 + pa * interference_term_near(model, T, r)));
          },
          r_b2, r_c2, 1.0 / (lb * kPi * slope), quad);
  return {clamp_probability(pieces.first + middle + pieces.third),
          CoverageMethod::ExactIntegral, std::nullopt};
}

CoverageBounds coverage_bounds(const PathLossModel& model,
                               const NetworkScenario& scenario) {
  require_bounded_dual_slope(model);
  scenario.validate();
  const double T = scenario.sir_threshold;
  const double pa = active_probability(scenario);
  const double lb = scenario.lambda_b;
  const double r_b2 = model.bounded_radius() * model.bounded_radius();
  const double r_c2 = model.critical_radius() * model.critical_radius();
  const ClosedPieces pieces = closed_pieces(model, scenario);

  CoverageBoundTerms terms;
  terms.h1 = pieces.h1;
  terms.h3 = pieces.h3;
  terms.core_area = pieces.core_area;
  terms.h2_lower = 1.0 + pa * interference_term_near(model, T, r_b2);
  terms.h2_upper = 1.0 + pa * interference_term_near(model, T, r_c2);

  // The near-field integrand is bracketed by freezing its slope at either
  // end of [r_b^2, r_c^2]; the steeper slope gives the lower bound.
  auto middle_with_slope = [&](double h) {
    return (std::exp(-lb * kPi * r_b2 * h) - std::exp(-lb * kPi * r_c2 * h)) /
           h;
  };
  const double lower_value =
      pieces.first + middle_with_slope(terms.h2_lower) + pieces.third;
  const double upper_value =
      pieces.first + middle_with_slope(terms.h2_upper) + pieces.third;

  CoverageBounds bounds;
  bounds.lower = {clamp_probability(std::min(lower_value, upper_value)),
                  CoverageMethod::LowerBound, std::nullopt};
  bounds.upper = {clamp_probability(std::max(lower_value, upper_value)),
                  CoverageMethod::UpperBound, std::nullopt};
  bounds.terms = terms;
  return bounds;
}

CoverageResult coverage_asymptotic(const PathLossModel& model, double lambda_u,
                                   double threshold) {
  require_bounded_dual_slope(model);
  check_threshold(threshold);
  if (std::isnan(lambda_u) || lambda_u < 0.0) {
    throw std::domain_error("lambda_u must be >= 0 (or +inf for full load)");
  }
  if (std::isinf(lambda_u)) {
    return {0.0, CoverageMethod::Asymptotic, std::nullopt};
  }
  const double value =
      std::exp(-lambda_u * kPi * core_interference_area(model, threshold));
  return {clamp_probability(value), CoverageMethod::Asymptotic, std::nullopt};
}

CoverageResult coverage_general(const PathLossModel& model,
                                const NetworkScenario& scenario,
                                const QuadratureSpec& quad) {
  scenario.validate();
  if (!(model.far_exponent() > 2.0)) {
    throw std::domain_error("far-field exponent must exceed 2");
  }
  const double T = scenario.sir_threshold;
  const double pa = active_probability(scenario);
  const double scale = scenario.lambda_b * kPi;

  // Mean interference weight for a server at squared distance z: integral
  // over t >= 1 of 1 / (1 + l(sqrt(z)) / (T l(sqrt(t z)))). Kinks at the
  // model breakpoints are split out and the pure power-law tail is added in
  // its exact hypergeometric form.
  auto inner = [&](double z) {
    const double signal = model.attenuation(std::sqrt(z));
    auto integrand = [&](double t) {
      return 1.0 / (1.0 + signal / (T * model.attenuation(std::sqrt(t * z))));
    };
    const double far_start = model.far_field_start();
    const double t_far = std::max(1.0, far_start * far_start / z);
    double value = 0.0;
    // numeric pieces up to the far-field onset, split at breakpoints
    double lo = 1.0;
    for (double d : model.breakpoints()) {
      const double t_break = d * d / z;
      if (t_break > lo && t_break < t_far) {
        value += integrate_log_panels(integrand, lo, t_break, quad);
        lo = t_break;
      }
    }
    if (t_far > lo) {
      value += integrate_log_panels(integrand, lo, t_far, quad);
    }
    // exact tail: attenuation is far_coefficient * d^-far from here on
    const double a_far = model.far_exponent();
    const double q = T * model.far_field_coefficient() /
                     (signal * std::pow(t_far * z, a_far / 2.0));
    value += 2.0 * t_far / (a_far - 2.0) * q * hyp_F(1.0 - 2.0 / a_far, q);
    return value;
  };

  // Outer integral in y = lambda_b pi z, split where the serving distance
  // crosses a model breakpoint. The integrand decays at least like e^-y, so
  // a quarter decay length keeps left boundary layers visible.
  auto outer = [&](double y) {
    return std::exp(-y * (1.0 + pa * inner(y / scale)));
  };
  double value = 0.0;
  double lo = 0.0;
  for (double d : model.breakpoints()) {
    const double y_break = scale * d * d;
    if (y_break > lo) {
      value += integrate_left_layer(outer, lo, y_break, 0.25, quad);
      lo = y_break;
    }
  }
  value += integrate(outer, lo, std::numeric_limits<double>::infinity(), quad);
  return {clamp_probability(value), CoverageMethod::GeneralOracle,
          std::nullopt};
}

double area_spectral_efficiency(const PathLossModel& model,
                                const NetworkScenario& scenario,
                                CoverageMethod method,
                                const QuadratureSpec& quad) {
  scenario.validate();
  double coverage = 0.0;
  switch (method) {
    case CoverageMethod::ExactIntegral:
      coverage = coverage_exact(model, scenario, quad).value;
      break;
    case CoverageMethod::LowerBound:
      coverage = coverage_bounds(model, scenario).lower.value;
      break;
    case CoverageMethod::UpperBound:
      coverage = coverage_bounds(model, scenario).upper.value;
      break;
    case CoverageMethod::Asymptotic:
      coverage = coverage_asymptotic(model, scenario.lambda_u,
                                     scenario.sir_threshold)
                     .value;
      break;
    case CoverageMethod::GeneralOracle:
      coverage = coverage_general(model, scenario, quad).value;
      break;
    case CoverageMethod::MonteCarlo:
      throw std::domain_error(
          "Monte Carlo ASE comes from the simulator, not the analysis");
  }
  const double pa = active_probability(scenario);
  return pa * scenario.lambda_b * coverage *
         std::log2(1.0 + scenario.sir_threshold);
}

AseBounds ase_bounds(const PathLossModel& model,
                     const NetworkScenario& scenario) {
  const CoverageBounds bounds = coverage_bounds(model, scenario);
  const double pa = active_probability(scenario);
  const double rate = std::log2(1.0 + scenario.sir_threshold);
  return {pa * scenario.lambda_b * bounds.lower.value * rate,
          pa * scenario.lambda_b * bounds.upper.value * rate};
}

}  // namespace udn
