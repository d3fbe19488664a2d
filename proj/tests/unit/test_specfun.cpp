#include "udn/specfun.hpp"

#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "udn/analysis.hpp"
#include "udn/pathloss.hpp"

using udn::ConvergenceError;
using udn::hyp_F;
using udn::integrate;
using udn::QuadratureSpec;

TEST_CASE("hypergeometric kernel anchor values") {
  CHECK(hyp_F(0.5, 0.0) == 1.0);
  CHECK(hyp_F(0.7, 0.0) == 1.0);
  // 2F1(1,1;2;-z) = log(1+z)/z
  CHECK(std::abs(hyp_F(1.0, 1.0) - std::log(2.0)) < 1e-15);
  // frozen reference values (25-digit arithmetic on the defining series)
  CHECK(hyp_F(0.5, 10.0) ==
        doctest::Approx(0.39987600505576614).epsilon(1e-12));
  CHECK(hyp_F(0.2, 10.0) ==
        doctest::Approx(0.65051230235702374).epsilon(1e-12));
  CHECK(hyp_F(0.8, 1000.0) ==
        doctest::Approx(0.013023081309091942).epsilon(1e-12));
  // closed form arctan(sqrt z)/sqrt z for b = 1/2
  for (double z : {0.2, 2.0, 40.0}) {
    CHECK(hyp_F(0.5, z) ==
          doctest::Approx(std::atan(std::sqrt(z)) / std::sqrt(z))
              .epsilon(1e-13));
  }
}

TEST_CASE("hypergeometric kernel matches the Euler integral") {
  for (double b : {0.2, 0.35, 0.5, 0.8, 0.97, 1.6, 2.5}) {
    for (double z : {0.05, 0.4, 0.9, 3.0, 10.0, 250.0, 4100.0}) {
      const double reference = udn::testing::euler_hyp_reference(b, z);
      CAPTURE(b);
      CAPTURE(z);
      CHECK(hyp_F(b, z) == doctest::Approx(reference).epsilon(5e-11));
    }
  }
}

TEST_CASE("evaluation branches agree on the Pfaff identity") {
  // F(b,z) (1+z) equals the transformed series in w = z/(1+z); summing that
  // series directly exercises a route independent of the branch selection.
  auto pfaff_reference = [](double b, double z) {
    const double w = z / (1.0 + z);
    double term = 1.0, sum = 1.0;
    for (long n = 1; n < 5000000; ++n) {
      term *= w * static_cast<double>(n) / (static_cast<double>(n) + b);
      sum += term;
      if (term <= 1e-17 * sum) break;
    }
    return sum / (1.0 + z);
  };
  for (double b : {0.2, 0.5, 0.8}) {
    for (double z : {0.3, 0.49, 0.51, 7.0, 29.0, 31.0, 500.0}) {
      CAPTURE(b);
      CAPTURE(z);
      CHECK(hyp_F(b, z) ==
            doctest::Approx(pfaff_reference(b, z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("hypergeometric kernel is strictly decreasing in z") {
  for (double b : {0.2, 0.5, 0.8, 1.5}) {
    double previous = hyp_F(b, 0.0);
    for (double z = 0.125; z < 3000.0; z *= 2.0) {
      const double value = hyp_F(b, z);
      CHECK(value < previous);
      CHECK(value > 0.0);
      previous = value;
    }
  }
}

TEST_CASE("hypergeometric kernel domain errors") {
  CHECK_THROWS_AS((void)hyp_F(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)hyp_F(-0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)hyp_F(0.5, -0.1), std::domain_error);
  CHECK_THROWS_AS((void)hyp_F(0.5, std::nan("")), std::domain_error);
}

TEST_CASE("quadrature closed-form anchors") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, inf) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0) ==
        doctest::Approx(std::atan(1.0)).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, 3.14159) ==
        doctest::Approx(1.0 - std::cos(3.14159)).epsilon(1e-12));
  // degenerate and reversed limits
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0) ==
        doctest::Approx(-0.5));
}

TEST_CASE("quadrature is linear within ten times the tolerance") {
  QuadratureSpec spec;
  auto f = [](double x) { return std::sin(3.0 * x) + 0.2; };
  auto g = [](double x) { return std::exp(-0.7 * x); };
  const double a = 2.5, c = -1.25;
  const double combined = integrate(
      [&](double x) { return a * f(x) + c * g(x); }, 0.0, 2.0, spec);
  const double split = a * integrate(f, 0.0, 2.0, spec) +
                       c * integrate(g, 0.0, 2.0, spec);
  CHECK(std::abs(combined - split) <=
        10.0 * spec.rel_tol * std::abs(combined) + 10.0 * spec.abs_tol);
}

TEST_CASE("quadrature failure carries the best estimate") {
  QuadratureSpec tiny;
  tiny.max_subdivisions = 4;
  tiny.rel_tol = 1e-12;
  tiny.abs_tol = 0.0;
  bool thrown = false;
  try {
    (void)integrate([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0,
                    tiny);
  } catch (const ConvergenceError& e) {
    thrown = true;
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.best_estimate() > 0.0);
    CHECK(e.error_bound() > 0.0);
  }
  CHECK(thrown);
}

TEST_CASE("quadrature rejects non-decaying infinite tails") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(
      (void)integrate([](double x) { return x; }, 0.0, inf),
      std::domain_error);
}

TEST_CASE("near-field coverage integrand matches a fixed trapezoid rule") {
  // full-load reference scenario at lambda_b = 1e-4 per m^2
  const udn::PathLossModel model =
      udn::PathLossModel::bounded_dual_slope(1.0, 70.0, 2.5, 4.0);
  const double lambda_b = 1e-4;
  const double threshold = 10.0;
  const double pi = 3.14159265358979323846;
  auto integrand = [&](double r) {
    return std::exp(-lambda_b * pi * r *
                    (1.0 + udn::interference_term_near(model, threshold, r)));
  };
  const double adaptive = integrate(integrand, 1.0, 4900.0);
  const double reference =
      udn::testing::trapezoid(integrand, 1.0, 4900.0, 1000001);
  CHECK(adaptive == doctest::Approx(reference).epsilon(1e-8));
}
