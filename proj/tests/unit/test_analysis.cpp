#include "udn/analysis.hpp"

#include <cmath>

#include <doctest.h>

#include "udn/pathloss.hpp"

using namespace udn;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kM2PerKm2 = 1e6;  // exact in binary, so km^2 values round trip

PathLossModel reference_model() {
  return PathLossModel::bounded_dual_slope(1.0, 70.0, 2.5, 4.0);
}

NetworkScenario km2(double lambda_b, double lambda_u, double threshold = 10.0) {
  NetworkScenario s;
  s.lambda_b = lambda_b / kM2PerKm2;
  s.lambda_u = std::isinf(lambda_u) ? NetworkScenario::full_load()
                                    : lambda_u / kM2PerKm2;
  s.sir_threshold = threshold;
  return s;
}

const double kFull = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("active probability") {
  CHECK(active_probability(km2(100.0, 0.0)) == 0.0);
  // ratio 3.5 collapses to 1 - 2^-3.5
  const double at_ratio = active_probability(km2(100.0, 350.0));
  CHECK(at_ratio == doctest::Approx(1.0 - std::pow(2.0, -3.5)).epsilon(1e-15));
  CHECK(at_ratio == doctest::Approx(0.9116116523516815).epsilon(1e-12));
  // the full-load proxy density from the reference experiments
  CHECK(active_probability(km2(1e4, 2e8)) >= 0.999999);
  CHECK(active_probability(km2(1e4, kFull)) == 1.0);
  CHECK_THROWS_AS(active_probability(km2(0.0, 10.0)), std::domain_error);
  CHECK_THROWS_AS(active_probability(km2(10.0, -1.0)), std::domain_error);
}

TEST_CASE("interference area reference constant") {
  const PathLossModel model = reference_model();
  // frozen from 25-digit evaluation of the closed form, cross-checked
  // against brute-force quadrature of the defining interference integral
  const double reference = 23.343994345463383;
  CHECK(core_interference_area(model, 10.0) ==
        doctest::Approx(reference).epsilon(1e-10));
  // at r_b = 1 the core constant equals the near-field profile endpoint
  CHECK(interference_area(model, 10.0, 1.0) ==
        doctest::Approx(core_interference_area(model, 10.0))
            .epsilon(1e-12));
}

TEST_CASE("interference area grows with the threshold and vanishes at zero") {
  const PathLossModel model = reference_model();
  double previous = 0.0;
  for (double threshold : {0.1, 1.0, 10.0, 100.0}) {
    const double value = interference_area(model, threshold, 1.0);
    CHECK(value > previous);
    previous = value;
  }
  CHECK(interference_area(model, 1e-8, 1.0) <
        1e-6 * interference_area(model, 10.0, 1.0));
  CHECK_THROWS_AS(interference_area(model, 10.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(interference_area(model, 10.0, 71.0), std::domain_error);
  CHECK_THROWS_AS(
      interference_area(PathLossModel::unbounded_single_slope(4.0), 10.0, 1.0),
      std::domain_error);
}

TEST_CASE("far interference term and its closed form") {
  const PathLossModel model = reference_model();
  // 2T/(far-2) F(1-2/far, T) at T=10, far=4
  CHECK(interference_term_far(model, 10.0) ==
        doctest::Approx(3.9987600505576614).epsilon(1e-12));
  CHECK(interference_term_far(model, 10.0) ==
        doctest::Approx(10.0 * hyp_F(0.5, 10.0)).epsilon(1e-15));
}

TEST_CASE("core interference term is affine in the squared distance") {
  const PathLossModel model = reference_model();
  const double T = 10.0;
  const double r1 = 0.2, r2 = 0.9;
  const double lhs = interference_term_core(model, T, r1) * r1 -
                     interference_term_core(model, T, r2) * r2;
  const double rhs = -T / (1.0 + T) * (r1 - r2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  CHECK_THROWS_AS(interference_term_core(model, T, 0.0), std::domain_error);
  CHECK_THROWS_AS(interference_term_core(model, T, 1.5), std::domain_error);
}

TEST_CASE("near interference term decreases over the near-field range") {
  const PathLossModel model = reference_model();
  const double T = 10.0;
  const double r_lo = 1.0, r_hi = 4900.0;
  CHECK(interference_term_near(model, T, r_lo) >
        interference_term_near(model, T, r_hi));
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / 99.0;
    const double value = interference_term_near(model, T, r);
    CHECK(value < previous);
    previous = value;
  }
  CHECK_THROWS_AS(interference_term_near(model, T, 0.5), std::domain_error);
  CHECK_THROWS_AS(interference_term_near(model, T, 4901.0),
                  std::domain_error);
}

TEST_CASE("coverage integrand is continuous across serving regions") {
  const PathLossModel model = reference_model();
  const double T = 10.0;
  const NetworkScenario sc = km2(1000.0, 200.0);
  const double pa = active_probability(sc);
  const double at_core = 1.0 + pa * interference_term_core(model, T, 1.0);
  const double at_near_lo = 1.0 + pa * interference_term_near(model, T, 1.0);
  const double at_near_hi =
      1.0 + pa * interference_term_near(model, T, 4900.0);
  const double at_far = 1.0 + pa * interference_term_far(model, T);
  CHECK(std::abs(at_core - at_near_lo) / at_core < 1e-8);
  CHECK(std::abs(at_near_hi - at_far) / at_far < 1e-8);
}

TEST_CASE("exact coverage frozen references") {
  const PathLossModel model = reference_model();
  // frozen from 25-digit evaluation of the closed-form pieces
  CHECK(coverage_exact(model, km2(10.0, 20.0)).value ==
        doctest::Approx(0.2318447217).epsilon(1e-7));
  CHECK(coverage_exact(model, km2(1000.0, 2000.0)).value ==
        doctest::Approx(0.0686623328).epsilon(1e-7));
  CHECK(coverage_exact(model, km2(100000.0, 2000.0)).value ==
        doctest::Approx(0.6881813482).epsilon(1e-7));
  CHECK(coverage_exact(model, km2(100.0, kFull)).value ==
        doctest::Approx(0.0961294246417).epsilon(1e-7));
  const CoverageResult res = coverage_exact(model, km2(100.0, 200.0));
  CHECK(res.method == CoverageMethod::ExactIntegral);
  CHECK_FALSE(res.half_width.has_value());
}

TEST_CASE("coverage tends to one at vanishing threshold") {
  const PathLossModel model = reference_model();
  CHECK(coverage_exact(model, km2(1000.0, 200.0, 1e-9)).value ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(coverage_general(model, km2(1000.0, 200.0, 1e-9)).value ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("coverage decreases in the threshold") {
  const PathLossModel model = reference_model();
  double previous = 1.1;
  for (double threshold : {0.1, 1.0, 10.0, 100.0}) {
    const double value =
        coverage_exact(model, km2(1000.0, 200.0, threshold)).value;
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("full-load sentinel agrees with the numeric proxy") {
  const PathLossModel model = reference_model();
  const double sentinel = coverage_exact(model, km2(100.0, kFull)).value;
  const double proxy = coverage_exact(model, km2(100.0, 2e8)).value;
  CHECK(std::abs(sentinel - proxy) < 1e-6);
}

TEST_CASE("general integral agrees with the closed-form route") {
  const PathLossModel model = reference_model();
  for (const NetworkScenario& sc :
       {km2(10.0, 20.0), km2(1000.0, 2000.0), km2(100.0, kFull)}) {
    const double exact = coverage_exact(model, sc).value;
    const double general = coverage_general(model, sc).value;
    CHECK(std::abs(exact - general) < 1e-6);
  }
}

TEST_CASE("general integral handles every variant") {
  // degenerate dual slope equals the single slope model
  const PathLossModel degenerate =
      PathLossModel::bounded_dual_slope(1.0, 70.0, 4.0, 4.0);
  const PathLossModel single = PathLossModel::bounded_single_slope(1.0, 4.0);
  const NetworkScenario sc = km2(10000.0, kFull);
  CHECK(std::abs(coverage_general(degenerate, sc).value -
                 coverage_general(single, sc).value) < 1e-6);

  // density-invariant unbounded single slope baseline at T = 1
  const PathLossModel unbounded = PathLossModel::unbounded_single_slope(4.0);
  const double baseline =
      coverage_general(unbounded, km2(100.0, kFull, 1.0)).value;
  CHECK(baseline == doctest::Approx(0.560099153512).epsilon(1e-7));
  CHECK(std::abs(coverage_general(unbounded, km2(10000.0, kFull, 1.0)).value -
                 baseline) < 1e-7);

  // unbounded dual slope runs and lands in (0, 1)
  const PathLossModel uds = PathLossModel::unbounded_dual_slope(70.0, 2.5, 4.0);
  const double uds_value = coverage_general(uds, km2(10000.0, kFull)).value;
  CHECK(uds_value > 0.0);
  CHECK(uds_value < 1.0);
}

TEST_CASE("bounds sandwich the exact coverage") {
  const PathLossModel model = reference_model();
  for (double lb : {10.0, 316.22776601683796, 10000.0, 316227.76601683791,
                    1e6}) {
    for (double lu : {20.0, 200.0, 2000.0}) {
      const NetworkScenario sc = km2(lb, lu);
      const double exact = coverage_exact(model, sc).value;
      const CoverageBounds bounds = coverage_bounds(model, sc);
      CAPTURE(lb);
      CAPTURE(lu);
      CHECK(bounds.lower.value <= exact + 1e-12);
      CHECK(exact <= bounds.upper.value + 1e-12);
      CHECK(bounds.lower.value <= bounds.upper.value);
      CHECK(bounds.terms.h1 > 0.0);
      CHECK(bounds.terms.h1 <= 1.0);
      CHECK(bounds.terms.h3 >= 1.0);
      CHECK(bounds.terms.h2_lower >= bounds.terms.h2_upper);
    }
  }
}

TEST_CASE("bounds pinch together in the dense regime") {
  const PathLossModel model = reference_model();
  const CoverageBounds dense = coverage_bounds(model, km2(1e8, 200.0));
  CHECK(dense.upper.value - dense.lower.value < 1e-4);
  const CoverageBounds full = coverage_bounds(model, km2(1e6, kFull));
  CHECK(full.lower.value < 1e-3);
  CHECK(full.upper.value < 1e-3);
}

TEST_CASE("asymptotic coverage") {
  const PathLossModel model = reference_model();
  CHECK(coverage_asymptotic(model, 0.0, 10.0).value == 1.0);
  CHECK(coverage_asymptotic(model, NetworkScenario::full_load(), 10.0).value ==
        0.0);
  double previous = 1.1;
  for (double lu : {20.0, 200.0, 2000.0}) {
    const double value =
        coverage_asymptotic(model, lu / kM2PerKm2, 10.0).value;
    CHECK(value < previous);
    previous = value;
  }
  // plateau value for 200 users per km^2
  CHECK(coverage_asymptotic(model, 200.0 / kM2PerKm2, 10.0).value ==
        doctest::Approx(0.985439579).epsilon(1e-9));
  // exact coverage approaches the limit at extreme density
  const double exact = coverage_exact(model, km2(1e6, 200.0)).value;
  const double limit = coverage_asymptotic(model, 200.0 / kM2PerKm2, 10.0).value;
  CHECK(std::abs(exact - limit) / limit < 0.01);
}

TEST_CASE("area spectral efficiency") {
  const PathLossModel model = reference_model();
  CHECK(area_spectral_efficiency(model, km2(100.0, 0.0),
                                 CoverageMethod::ExactIntegral) == 0.0);
  CHECK(area_spectral_efficiency(model, km2(100.0, 200.0, 1e-12),
                                 CoverageMethod::ExactIntegral) < 1e-12);
  CHECK_THROWS_AS(area_spectral_efficiency(model, km2(100.0, 200.0),
                                           CoverageMethod::MonteCarlo),
                  std::domain_error);

  // dense-network ASE limit: lambda_u exp(-lambda_u pi area) log2(1+T)
  const NetworkScenario sc = km2(1e8, 200.0);
  const double ase =
      area_spectral_efficiency(model, sc, CoverageMethod::ExactIntegral);
  const double limit = sc.lambda_u *
                       std::exp(-sc.lambda_u * kPi *
                                core_interference_area(model, 10.0)) *
                       std::log2(11.0);
  CHECK(std::abs(ase - limit) / limit < 0.01);
}

TEST_CASE("ASE bounds") {
  const PathLossModel model = reference_model();
  const AseBounds zero = ase_bounds(model, km2(100.0, 0.0));
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == 0.0);
  for (double lb : {10.0, 1000.0, 1e5}) {
    for (double lu : {20.0, 200.0, kFull}) {
      const NetworkScenario sc = km2(lb, lu);
      const AseBounds bounds = ase_bounds(model, sc);
      const double exact = area_spectral_efficiency(
          model, sc, CoverageMethod::ExactIntegral);
      CAPTURE(lb);
      CAPTURE(lu);
      CHECK(bounds.lower <= exact * (1.0 + 1e-9) + 1e-30);
      CHECK(exact <= bounds.upper * (1.0 + 1e-9) + 1e-30);
    }
  }
  // both bounds reach the dense-network limit
  const NetworkScenario dense = km2(1e8, 200.0);
  const AseBounds bounds = ase_bounds(model, dense);
  const double limit = dense.lambda_u *
                       std::exp(-dense.lambda_u * kPi *
                                core_interference_area(model, 10.0)) *
                       std::log2(11.0);
  CHECK(std::abs(bounds.lower - limit) / limit < 0.01);
  CHECK(std::abs(bounds.upper - limit) / limit < 0.01);
}

TEST_CASE("scenario validation") {
  const PathLossModel model = reference_model();
  CHECK_THROWS_AS(coverage_exact(model, km2(100.0, 200.0, 0.0)),
                  std::domain_error);
  CHECK_THROWS_AS(coverage_exact(model, km2(100.0, 200.0, -1.0)),
                  std::domain_error);
  CHECK_THROWS_AS(
      coverage_exact(PathLossModel::unbounded_single_slope(4.0),
                     km2(100.0, 200.0)),
      std::domain_error);
  NetworkScenario nan_lu = km2(100.0, 200.0);
  nan_lu.lambda_u = std::nan("");
  CHECK_THROWS_AS(active_probability(nan_lu), std::domain_error);
}
