#pragma once

#include <limits>
#include <optional>
#include <string_view>

#include "udn/pathloss.hpp"
#include "udn/specfun.hpp"

namespace udn {

/// Deployment densities and target SIR. Densities are per square meter;
/// lambda_u may be full_load() (infinity) to model a saturated network in
/// which every base station transmits.
struct NetworkScenario {
  double lambda_b = 0.0;      // base stations per m^2
  double lambda_u = 0.0;      // users per m^2, may be +inf
  double sir_threshold = 1.0; // linear scale

  static constexpr double full_load() {
    return std::numeric_limits<double>::infinity();
  }
  bool is_full_load() const {
    return lambda_u == std::numeric_limits<double>::infinity();
  }
  void validate() const;
};

enum class CoverageMethod {
  ExactIntegral,
  LowerBound,
  UpperBound,
  Asymptotic,
  GeneralOracle,
  MonteCarlo,
};

std::string_view to_string(CoverageMethod m);

struct CoverageResult {
  double value = 0.0;  // probability in [0, 1]
  CoverageMethod method = CoverageMethod::ExactIntegral;
  std::optional<double> half_width;  // 95% CI, Monte Carlo only
};

/// Slope factors of the closed-form coverage bounds, plus the interference
/// area constant they are built from.
struct CoverageBoundTerms {
  double h1 = 1.0;        // 1 - p_a T/(1+T), in (0, 1]
  double h2_lower = 1.0;  // 1 + p_a * near-term at the core edge
  double h2_upper = 1.0;  // 1 + p_a * near-term at the critical distance
  double h3 = 1.0;        // 1 + p_a * far-term, >= 1
  double core_area = 0.0; // m^2, see core_interference_area()
};

struct CoverageBounds {
  CoverageResult lower;
  CoverageResult upper;
  CoverageBoundTerms terms;
};

struct AseBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Probability that a base station has at least one user in its cell:
/// 1 - (1 + lambda_u / (3.5 lambda_b))^-3.5. Exactly 1 under full load.
double active_probability(const NetworkScenario& scenario);

/// Effective interference area (m^2) for a server at distance x inside the
/// near field, x in [r_b, r_c]. Requires a BoundedDualSlope model and a
/// linear threshold > 0.
double interference_area(const PathLossModel& model, double threshold,
                         double x);

/// Interference area constant for a server inside the constant-gain core.
/// This is the constant that governs the dense-network coverage limit; it
/// coincides with interference_area(model, threshold, r_b) when r_b = 1.
double core_interference_area(const PathLossModel& model, double threshold);

/// Piecewise interference factors of the coverage integrand, by the region
/// the serving base station falls in. r is the squared serving distance.
double interference_term_core(const PathLossModel& model, double threshold,
                              double r);  // r in (0, r_b^2]
double interference_term_near(const PathLossModel& model, double threshold,
                              double r);  // r in [r_b^2, r_c^2]
double interference_term_far(const PathLossModel& model, double threshold);

/// Coverage probability P(SIR > T) under a BoundedDualSlope model: closed
/// exponential forms for the core and far serving regions plus adaptive
/// quadrature over the near-field region.
CoverageResult coverage_exact(const PathLossModel& model,
                              const NetworkScenario& scenario,
                              const QuadratureSpec& quad = {});

/// Closed-form lower/upper bounds on coverage_exact.
CoverageBounds coverage_bounds(const PathLossModel& model,
                               const NetworkScenario& scenario);

/// Dense-network limit exp(-lambda_u pi core_area). Returns 0 for full load.
CoverageResult coverage_asymptotic(const PathLossModel& model, double lambda_u,
                                   double threshold);

/// Coverage probability for any path loss variant by nested quadrature of
/// the defining double integral (with the analytic far-field tail folded in
/// exactly). Serves as the independent cross-check of coverage_exact.
CoverageResult coverage_general(const PathLossModel& model,
                                const NetworkScenario& scenario,
                                const QuadratureSpec& quad = {});

/// Area spectral efficiency p_a lambda_b P_c log2(1+T) in bit/s/Hz per m^2,
/// with P_c computed by the designated analytic method.
double area_spectral_efficiency(const PathLossModel& model,
                                const NetworkScenario& scenario,
                                CoverageMethod method,
                                const QuadratureSpec& quad = {});

/// ASE bounds from the coverage bounds.
AseBounds ase_bounds(const PathLossModel& model,
                     const NetworkScenario& scenario);

}  // namespace udn
