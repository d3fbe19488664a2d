#include "udn/montecarlo.hpp"

#include <cmath>
#include <numeric>

#include <doctest.h>

#include "udn/analysis.hpp"
#include "udn/pathloss.hpp"

using namespace udn;

namespace {

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

TEST_CASE("point process sampling") {
  Rng rng = make_trial_rng(7, 0);

  SUBCASE("zero density gives an empty set") {
    CHECK(sample_ppp(0.0, 100.0, rng).empty());
  }

  SUBCASE("count and radial uniformity over many draws") {
    // mean 1000 points per draw
    const double radius = 100.0;
    const double density = 1000.0 / (3.14159265358979323846 * radius * radius);
    long long total = 0;
    long long inside_half = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const auto points = sample_ppp(density, radius, rng);
      total += static_cast<long long>(points.size());
      for (const Vec2& p : points) {
        if (p.x * p.x + p.y * p.y <= 0.25 * radius * radius) inside_half++;
      }
    }
    const double mean = static_cast<double>(total) / draws;
    // 3 sigma of the sample mean of Poisson(1000) over 1e4 draws
    CHECK(std::abs(mean - 1000.0) < 3.0 * std::sqrt(1000.0) / 100.0);
    // the quarter-area disk holds a quarter of the points (binomial 3 sigma)
    const double fraction =
        static_cast<double>(inside_half) / static_cast<double>(total);
    const double sigma =
        std::sqrt(0.25 * 0.75 / static_cast<double>(total));
    CHECK(std::abs(fraction - 0.25) < 3.0 * sigma);
  }

  SUBCASE("expected-count guard") {
    CHECK_THROWS_AS((void)sample_ppp(1.0, 1e5, rng, 1e7),
                    std::runtime_error);
    CHECK_THROWS_AS((void)sample_ppp(-1.0, 10.0, rng), std::domain_error);
    CHECK_THROWS_AS((void)sample_ppp(1.0, 0.0, rng), std::domain_error);
  }
}

TEST_CASE("realizations are deterministic in (seed, trial)") {
  const PathLossModel model = reference_model();
  const NetworkScenario sc = km2(100.0, 200.0);
  SimConfig config;
  config.master_seed = 31337;
  const Realization a = build_realization(model, sc, config, 17);
  const Realization b = build_realization(model, sc, config, 17);
  REQUIRE(a.bs.size() == b.bs.size());
  REQUIRE(a.ue.size() == b.ue.size());
  CHECK(a.serving == b.serving);
  for (std::size_t i = 0; i < a.bs.size(); ++i) {
    CHECK(a.bs[i].x == b.bs[i].x);
    CHECK(a.bs[i].y == b.bs[i].y);
  }
  CHECK(a.active == b.active);

  const Realization c = build_realization(model, sc, config, 18);
  CHECK(a.bs.size() != c.bs.size());  // different substream
}

TEST_CASE("serving station and activity structure") {
  const PathLossModel model = reference_model();
  SimConfig config;
  config.master_seed = 5;

  SUBCASE("no users leaves only the serving station active") {
    const Realization real =
        build_realization(model, km2(100.0, 0.0), config, 3);
    REQUIRE(real.serving >= 0);
    CHECK(real.active[static_cast<std::size_t>(real.serving)] == 1);
    long long active_count =
        std::accumulate(real.active.begin(), real.active.end(), 0ll);
    CHECK(active_count == 1);
  }

  SUBCASE("serving station is the nearest one") {
    const Realization real =
        build_realization(model, km2(100.0, 200.0), config, 3);
    const auto d2 = [](const Vec2& p) { return p.x * p.x + p.y * p.y; };
    const double serving_d2 =
        d2(real.bs[static_cast<std::size_t>(real.serving)]);
    for (const Vec2& p : real.bs) CHECK(serving_d2 <= d2(p));
    CHECK(real.active[static_cast<std::size_t>(real.serving)] == 1);
  }

  SUBCASE("full load activates everything") {
    const Realization real =
        build_realization(model, km2(100.0, kFull), config, 3);
    CHECK(real.ue.empty());
    for (std::uint8_t a : real.active) CHECK(a == 1);
  }
}

TEST_CASE("empty station draws are resampled and counted") {
  const PathLossModel model = reference_model();
  SimConfig config;
  config.master_seed = 4242;
  config.window_radius = 210.0;  // smallest legal window for r_c = 70
  // about half an expected station per window, so empty draws are common
  const NetworkScenario sc = km2(3.6, 0.0);
  bool saw_resample = false;
  for (long trial = 0; trial < 21; ++trial) {
    const Realization real = build_realization(model, sc, config, trial);
    CHECK_FALSE(real.bs.empty());
    if (real.resamples > 0) saw_resample = true;
  }
  CHECK(saw_resample);
}

TEST_CASE("empirical activity matches the cell-void formula") {
  const PathLossModel model = reference_model();
  SimConfig config;
  config.trials = 200;
  config.master_seed = 1123;
  const NetworkScenario sc = km2(100.0, 350.0);  // ratio 3.5
  const SimResult result = estimate_coverage(model, sc, config);
  CHECK(result.bs_observed > 40000);
  CHECK(std::abs(result.p_active - active_probability(sc)) < 0.01);
}

TEST_CASE("SIR of a two-station toy layout") {
  const PathLossModel model = reference_model();
  Realization toy;
  toy.bs = {{10.0, 0.0}, {100.0, 0.0}};
  toy.active = {1, 1};
  toy.serving = 0;
  toy.window_radius = 1000.0;
  const double expected =
      model.attenuation(10.0) / model.attenuation(100.0);

  SUBCASE("unit fading is pure geometry") {
    CHECK(sir_unit_fading(toy, model) == doctest::Approx(expected));
  }

  SUBCASE("no interferer means infinite SIR") {
    toy.active = {1, 0};
    Rng rng = make_trial_rng(1, 1);
    CHECK(std::isinf(sample_sir(toy, model, rng)));
    CHECK(std::isinf(sir_unit_fading(toy, model)));
  }

  SUBCASE("fading ratio distribution") {
    // For unit-mean exponential fading on both links,
    // P(SIR > s l0/l1) = 1/(1+s); at s = 1 this is one half.
    Rng rng = make_trial_rng(2024, 0);
    const int draws = 20000;
    int above = 0;
    for (int i = 0; i < draws; ++i) {
      if (sample_sir(toy, model, rng) > expected) above++;
    }
    const double fraction = static_cast<double>(above) / draws;
    const double sigma = std::sqrt(0.25 / draws);
    CHECK(std::abs(fraction - 0.5) < 3.0 * sigma);
  }

  SUBCASE("missing serving station is an error") {
    toy.serving = -1;
    Rng rng = make_trial_rng(1, 1);
    CHECK_THROWS_AS((void)sample_sir(toy, model, rng), std::domain_error);
  }
}

TEST_CASE("coverage estimation") {
  const PathLossModel model = reference_model();

  SUBCASE("vanishing threshold covers every trial") {
    SimConfig config;
    config.trials = 300;
    config.master_seed = 9;
    const SimResult result =
        estimate_coverage(model, km2(100.0, 200.0, 1e-12), config);
    CHECK(result.coverage.value == 1.0);
    CHECK(result.coverage.method == CoverageMethod::MonteCarlo);
    REQUIRE(result.coverage.half_width.has_value());
    CHECK(*result.coverage.half_width == 0.0);
  }

  SUBCASE("estimate tracks the analytic value") {
    SimConfig config;
    config.trials = 4000;
    config.master_seed = 7;
    const NetworkScenario sc = km2(100.0, 200.0);
    const SimResult result = estimate_coverage(model, sc, config);
    const double exact = coverage_exact(model, sc).value;
    const double allowed =
        std::max(3.0 * result.coverage.half_width.value_or(0.0), 0.02);
    CHECK(std::abs(result.coverage.value - exact) < allowed);
    // empirical ASE is the plug-in estimate
    CHECK(result.ase ==
          doctest::Approx(result.p_active * sc.lambda_b *
                          result.coverage.value * std::log2(11.0)));
  }

  SUBCASE("independent thinning agrees with the cell-based mode") {
    SimConfig voronoi;
    voronoi.trials = 5000;
    voronoi.master_seed = 21;
    SimConfig thinning = voronoi;
    thinning.load_mode = LoadMode::IndependentThinning;
    const NetworkScenario sc = km2(100.0, 200.0);
    const double a = estimate_coverage(model, sc, voronoi).coverage.value;
    const double b = estimate_coverage(model, sc, thinning).coverage.value;
    CHECK(std::abs(a - b) < 0.02);
  }

  SUBCASE("result does not depend on the thread count") {
    SimConfig one;
    one.trials = 600;
    one.master_seed = 33;
    one.threads = 1;
    SimConfig four = one;
    four.threads = 4;
    const NetworkScenario sc = km2(100.0, 200.0);
    const SimResult a = estimate_coverage(model, sc, one);
    const SimResult b = estimate_coverage(model, sc, four);
    CHECK(a.coverage.value == b.coverage.value);
    CHECK(a.covered == b.covered);
    CHECK(a.bs_observed == b.bs_observed);
    CHECK(a.bs_active == b.bs_active);
    CHECK(a.p_active == b.p_active);
  }

  SUBCASE("doubling the window stays within the confidence width") {
    SimConfig base;
    base.trials = 4000;
    base.master_seed = 7;
    const NetworkScenario sc = km2(100.0, 200.0);
    const SimResult narrow = estimate_coverage(model, sc, base);
    SimConfig wide = base;
    wide.window_radius = 2.0 * narrow.window_radius;
    const SimResult wider = estimate_coverage(model, sc, wide);
    CHECK(std::abs(narrow.coverage.value - wider.coverage.value) <
          narrow.coverage.half_width.value_or(0.0));
  }
}

TEST_CASE("guards") {
  const PathLossModel model = reference_model();
  SimConfig config;

  SUBCASE("density floor") {
    CHECK_THROWS_AS(
        estimate_coverage(model, km2(1e-5, 200.0), config),
        std::domain_error);
  }

  SUBCASE("window must hold three critical radii") {
    config.window_radius = 100.0;  // < 3 * 70
    CHECK_THROWS_AS(estimate_coverage(model, km2(100.0, 200.0), config),
                    std::domain_error);
  }

  SUBCASE("boundary guard trips for an undersized window") {
    // at 1 station per km^2 the serving distance is ~500 m, far beyond a
    // third of the minimum legal window for this geometry
    config.window_radius = 210.0;
    config.trials = 50;
    CHECK_THROWS_AS(estimate_coverage(model, km2(1.0, kFull), config),
                    std::runtime_error);
  }

  SUBCASE("trial count must be positive") {
    config.trials = 0;
    CHECK_THROWS_AS(estimate_coverage(model, km2(100.0, 200.0), config),
                    std::domain_error);
  }
}
