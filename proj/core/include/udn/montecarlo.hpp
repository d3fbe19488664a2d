#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "udn/analysis.hpp"
#include "udn/pathloss.hpp"

namespace udn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class LoadMode {
  ExactVoronoi,         // a station is active iff its cell holds a user
  IndependentThinning,  // i.i.d. Bernoulli(p_a), serving station forced on
};

std::string_view to_string(LoadMode m);
LoadMode load_mode_from_string(std::string_view name);

struct SimConfig {
  long trials = 10000;
  std::uint64_t master_seed = 1;
  double window_radius = 0.0;  // meters; 0 selects automatic sizing
  LoadMode load_mode = LoadMode::ExactVoronoi;
  int min_expected_bs = 500;          // drives automatic window sizing
  double max_expected_points = 1e7;   // per-process sampling guard
  unsigned threads = 0;               // 0 = hardware concurrency

  void validate(const PathLossModel& model) const;
};

/// One sampled network: station/user positions, per-station activity, and
/// the station serving the probe user at the origin.
struct Realization {
  std::vector<Vec2> bs;
  std::vector<Vec2> ue;
  std::vector<std::uint8_t> active;
  std::ptrdiff_t serving = -1;
  double window_radius = 0.0;
  int resamples = 0;  // empty-network redraws before this realization
};

using Rng = std::mt19937_64;

/// Independent substream for one trial; a pure function of the two seeds.
Rng make_trial_rng(std::uint64_t master_seed, std::uint64_t trial_index);

/// Homogeneous Poisson process on a disk of the given radius centered at the
/// origin: Poisson(density pi radius^2) points, i.i.d. uniform.
std::vector<Vec2> sample_ppp(double density, double radius, Rng& rng,
                             double max_expected_points = 1e7);

/// Window radius used when SimConfig.window_radius is 0: large enough to
/// hold min_expected_bs stations, at least three critical radii, and at
/// least ten mean station spacings.
double auto_window_radius(const PathLossModel& model,
                          const NetworkScenario& scenario,
                          const SimConfig& config);

/// Sample one network realization. Deterministic in (master_seed,
/// trial_index); an empty station draw is resampled and counted.
Realization build_realization(const PathLossModel& model,
                              const NetworkScenario& scenario,
                              const SimConfig& config, long trial_index);

/// SIR of the probe user at the origin with fresh unit-mean exponential
/// fading on every link. Returns +inf when no interferer is active.
double sample_sir(const Realization& realization, const PathLossModel& model,
                  Rng& rng);

/// SIR with all fading gains pinned to 1 (geometry only).
double sir_unit_fading(const Realization& realization,
                       const PathLossModel& model);

struct SimResult {
  CoverageResult coverage;      // method MonteCarlo, with 95% CI half width
  double p_active = 0.0;        // empirical, interior stations only
  double ase = 0.0;             // bit/s/Hz per m^2, from empirical p_active
  long trials = 0;
  long covered = 0;
  long long bs_observed = 0;    // interior stations across all trials
  long long bs_active = 0;
  long resampled_trials = 0;
  double flagged_fraction = 0.0;  // serving distance beyond window/3
  double window_radius = 0.0;
};

/// Estimate coverage by independent trials. Trials run in parallel; the
/// result is a pure function of (model, scenario, config) and in particular
/// does not depend on config.threads. Errors if more than 1% of trials have
/// a boundary-suspect serving distance.
SimResult estimate_coverage(const PathLossModel& model,
                            const NetworkScenario& scenario,
                            const SimConfig& config);

}  // namespace udn
