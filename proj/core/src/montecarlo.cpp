#include "udn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

namespace udn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLambdaBFloor = 1e-10;  // per m^2
constexpr int kMaxResamples = 10000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double norm2(const Vec2& p) { return p.x * p.x + p.y * p.y; }

// Uniform cell grid over [-w, w]^2 answering nearest-station queries by
// expanding ring search. Stations are stored in CSR layout.
class NearestGrid {
 public:
  NearestGrid(const std::vector<Vec2>& points, double w)
      : points_(points), w_(w) {
    const int target = static_cast<int>(
        std::sqrt(static_cast<double>(std::max<std::size_t>(points.size(), 1))));
    n_ = std::clamp(target, 1, 2048);
    cell_ = 2.0 * w / n_;
    start_.assign(static_cast<std::size_t>(n_) * n_ + 1, 0);
    for (const Vec2& p : points) start_[cell_index(p) + 1]++;
    for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
    items_.resize(points.size());
    std::vector<int> cursor(start_.begin(), start_.end() - 1);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      items_[static_cast<std::size_t>(cursor[cell_index(points[i])]++)] = i;
    }
  }

  int nearest(const Vec2& q) const {
    const int ci = coord(q.x);
    const int cj = coord(q.y);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring < 2 * n_; ++ring) {
      bool any_cell = false;
      const int ilo = ci - ring, ihi = ci + ring;
      const int jlo = cj - ring, jhi = cj + ring;
      for (int i = std::max(0, ilo); i <= std::min(n_ - 1, ihi); ++i) {
        for (int j = std::max(0, jlo); j <= std::min(n_ - 1, jhi); ++j) {
          if (ring > 0 && i != ilo && i != ihi && j != jlo && j != jhi) {
            continue;  // interior of the ring was scanned earlier
          }
          any_cell = true;
          scan_cell(i, j, q, best, best_d2);
        }
      }
      if (best >= 0) {
        const double reach = static_cast<double>(ring) * cell_;
        if (best_d2 <= reach * reach) break;
      }
      if (!any_cell && ring >= n_) break;
    }
    return best;
  }

 private:
  int coord(double x) const {
    return std::clamp(static_cast<int>((x + w_) / cell_), 0, n_ - 1);
  }
  std::size_t cell_index(const Vec2& p) const {
    return static_cast<std::size_t>(coord(p.x)) * n_ + coord(p.y);
  }
  void scan_cell(int i, int j, const Vec2& q, int& best,
                 double& best_d2) const {
    const std::size_t c = static_cast<std::size_t>(i) * n_ + j;
    for (int k = start_[c]; k < start_[c + 1]; ++k) {
      const int idx = items_[static_cast<std::size_t>(k)];
      const double dx = points_[idx].x - q.x;
      const double dy = points_[idx].y - q.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = idx;
      }
    }
  }

  const std::vector<Vec2>& points_;
  double w_;
  int n_ = 1;
  double cell_ = 1.0;
  std::vector<int> start_;
  std::vector<int> items_;
};

Realization build_with_rng(const PathLossModel& model,
                           const NetworkScenario& scenario,
                           const SimConfig& config, Rng& rng) {
  Realization real;
  real.window_radius = config.window_radius > 0.0
                           ? config.window_radius
                           : auto_window_radius(model, scenario, config);
  const double w = real.window_radius;

  do {
    if (real.resamples > kMaxResamples) {
      throw std::runtime_error("could not draw a non-empty station process");
    }
    real.bs =
        sample_ppp(scenario.lambda_b, w, rng, config.max_expected_points);
    if (real.bs.empty()) real.resamples++;
  } while (real.bs.empty());

  real.serving = 0;
  double best = norm2(real.bs[0]);
  for (std::size_t i = 1; i < real.bs.size(); ++i) {
    const double d2 = norm2(real.bs[i]);
    if (d2 < best) {
      best = d2;
      real.serving = static_cast<std::ptrdiff_t>(i);
    }
  }

  if (scenario.is_full_load()) {
    // every cell holds a user, so every station transmits
    real.active.assign(real.bs.size(), 1);
    return real;
  }

  real.ue = sample_ppp(scenario.lambda_u, w, rng, config.max_expected_points);
  real.active.assign(real.bs.size(), 0);
  if (config.load_mode == LoadMode::ExactVoronoi) {
    const NearestGrid grid(real.bs, w);
    for (const Vec2& u : real.ue) {
      real.active[static_cast<std::size_t>(grid.nearest(u))] = 1;
    }
    real.active[static_cast<std::size_t>(real.serving)] = 1;  // probe user
  } else {
    const double pa = active_probability(scenario);
    std::bernoulli_distribution flip(pa);
    for (auto& a : real.active) a = flip(rng) ? 1 : 0;
    real.active[static_cast<std::size_t>(real.serving)] = 1;
  }
  return real;
}

}  // namespace

std::string_view to_string(LoadMode m) {
  return m == LoadMode::ExactVoronoi ? "exact_voronoi"
                                     : "independent_thinning";
}

LoadMode load_mode_from_string(std::string_view name) {
  if (name == "exact_voronoi") return LoadMode::ExactVoronoi;
  if (name == "independent_thinning") return LoadMode::IndependentThinning;
  throw std::invalid_argument("unknown load mode: " + std::string(name));
}

void SimConfig::validate(const PathLossModel& model) const {
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  if (window_radius < 0.0 || !std::isfinite(window_radius)) {
    throw std::domain_error("window_radius must be finite and >= 0");
  }
  if (window_radius > 0.0 &&
      window_radius < 3.0 * model.critical_radius()) {
    throw std::domain_error(
        "explicit window_radius must be at least 3 critical radii");
  }
  if (min_expected_bs < 1) {
    throw std::domain_error("min_expected_bs must be >= 1");
  }
  if (!(max_expected_points > 0.0)) {
    throw std::domain_error("max_expected_points must be positive");
  }
}

Rng make_trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
  const std::uint64_t mixed =
      splitmix64(master_seed ^ splitmix64(trial_index + 0x632BE59BD9B4E019ull));
  return Rng(mixed);
}

std::vector<Vec2> sample_ppp(double density, double radius, Rng& rng,
                             double max_expected_points) {
  if (!(std::isfinite(density) && density >= 0.0)) {
    throw std::domain_error("density must be finite and >= 0");
  }
  if (!(std::isfinite(radius) && radius > 0.0)) {
    throw std::domain_error("radius must be finite and positive");
  }
  const double expected = density * kPi * radius * radius;
  if (expected > max_expected_points) {
    throw std::runtime_error(
        "expected point count " + std::to_string(expected) +
        " exceeds the cap of " + std::to_string(max_expected_points));
  }
  if (expected == 0.0) return {};
  std::poisson_distribution<long> count(expected);
  const long n = count(rng);
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  for (long i = 0; i < n; ++i) {
    double x, y;
    do {
      x = sym(rng);
      y = sym(rng);
    } while (x * x + y * y > 1.0);
    points.push_back({x * radius, y * radius});
  }
  return points;
}

double auto_window_radius(const PathLossModel& model,
                          const NetworkScenario& scenario,
                          const SimConfig& config) {
  const double by_geometry = 3.0 * model.critical_radius();
  const double by_count =
      std::sqrt(config.min_expected_bs / (kPi * scenario.lambda_b));
  const double by_spacing = 10.0 / std::sqrt(scenario.lambda_b);
  return std::max({by_geometry, by_count, by_spacing});
}

Realization build_realization(const PathLossModel& model,
                              const NetworkScenario& scenario,
                              const SimConfig& config, long trial_index) {
  scenario.validate();
  config.validate(model);
  if (scenario.lambda_b < kLambdaBFloor) {
    throw std::domain_error("lambda_b below the simulator floor of 1e-10");
  }
  Rng rng = make_trial_rng(config.master_seed,
                           static_cast<std::uint64_t>(trial_index));
  return build_with_rng(model, scenario, config, rng);
}

double sample_sir(const Realization& realization, const PathLossModel& model,
                  Rng& rng) {
  if (realization.serving < 0 ||
      realization.serving >= static_cast<std::ptrdiff_t>(realization.bs.size())) {
    throw std::domain_error("realization has no serving station");
  }
  std::exponential_distribution<double> fading(1.0);
  const std::size_t serving = static_cast<std::size_t>(realization.serving);
  const double signal =
      fading(rng) * model.attenuation(std::sqrt(norm2(realization.bs[serving])));
  double interference = 0.0;
  for (std::size_t i = 0; i < realization.bs.size(); ++i) {
    if (i == serving || !realization.active[i]) continue;
    interference +=
        fading(rng) * model.attenuation(std::sqrt(norm2(realization.bs[i])));
  }
  if (interference == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return signal / interference;
}

double sir_unit_fading(const Realization& realization,
                       const PathLossModel& model) {
  if (realization.serving < 0 ||
      realization.serving >= static_cast<std::ptrdiff_t>(realization.bs.size())) {
    throw std::domain_error("realization has no serving station");
  }
  const std::size_t serving = static_cast<std::size_t>(realization.serving);
  const double signal =
      model.attenuation(std::sqrt(norm2(realization.bs[serving])));
  double interference = 0.0;
  for (std::size_t i = 0; i < realization.bs.size(); ++i) {
    if (i == serving || !realization.active[i]) continue;
    interference += model.attenuation(std::sqrt(norm2(realization.bs[i])));
  }
  if (interference == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return signal / interference;
}

namespace {

struct TrialRecord {
  std::uint8_t covered = 0;
  std::uint8_t flagged = 0;
  std::uint8_t resampled = 0;
  int bs_interior = 0;
  int bs_active_interior = 0;
};

TrialRecord run_trial(const PathLossModel& model,
                      const NetworkScenario& scenario, const SimConfig& config,
                      long trial) {
  Rng rng = make_trial_rng(config.master_seed,
                           static_cast<std::uint64_t>(trial));
  const Realization real = build_with_rng(model, scenario, config, rng);
  const double sir = sample_sir(real, model, rng);

  TrialRecord rec;
  rec.covered = sir > scenario.sir_threshold ? 1 : 0;
  const double serving_dist =
      std::sqrt(norm2(real.bs[static_cast<std::size_t>(real.serving)]));
  rec.flagged = serving_dist > real.window_radius / 3.0 ? 1 : 0;
  rec.resampled = real.resamples > 0 ? 1 : 0;

  // activity statistics over the window interior to keep cell-truncation
  // effects at the rim out of the estimate
  const double interior = 0.7 * real.window_radius;
  const double interior2 = interior * interior;
  for (std::size_t i = 0; i < real.bs.size(); ++i) {
    if (norm2(real.bs[i]) <= interior2) {
      rec.bs_interior++;
      rec.bs_active_interior += real.active[i] ? 1 : 0;
    }
  }
  return rec;
}

}  // namespace

SimResult estimate_coverage(const PathLossModel& model,
                            const NetworkScenario& scenario,
                            const SimConfig& config) {
  scenario.validate();
  config.validate(model);
  if (scenario.lambda_b < kLambdaBFloor) {
    throw std::domain_error("lambda_b below the simulator floor of 1e-10");
  }

  const long trials = config.trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));

  unsigned n_threads = config.threads != 0
                           ? config.threads
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(
      n_threads, static_cast<unsigned>(std::min<long>(trials, 256)));

  if (n_threads <= 1) {
    for (long t = 0; t < trials; ++t) {
      records[static_cast<std::size_t>(t)] =
          run_trial(model, scenario, config, t);
    }
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    const long chunk = (trials + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
      const long begin = static_cast<long>(w) * chunk;
      const long end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        try {
          for (long t = begin; t < end; ++t) {
            records[static_cast<std::size_t>(t)] =
                run_trial(model, scenario, config, t);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  SimResult out;
  out.trials = trials;
  out.window_radius = config.window_radius > 0.0
                          ? config.window_radius
                          : auto_window_radius(model, scenario, config);
  long flagged = 0;
  for (const TrialRecord& rec : records) {
    out.covered += rec.covered;
    flagged += rec.flagged;
    out.resampled_trials += rec.resampled;
    out.bs_observed += rec.bs_interior;
    out.bs_active += rec.bs_active_interior;
  }
  out.flagged_fraction =
      static_cast<double>(flagged) / static_cast<double>(trials);
  if (out.flagged_fraction > 0.01) {
    throw std::runtime_error(
        "more than 1% of trials had a boundary-suspect serving distance; "
        "increase the window radius");
  }

  const double p = static_cast<double>(out.covered) /
                   static_cast<double>(trials);
  const double half_width =
      1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  out.coverage = {p, CoverageMethod::MonteCarlo, half_width};
  out.p_active = out.bs_observed > 0
                     ? static_cast<double>(out.bs_active) /
                           static_cast<double>(out.bs_observed)
                     : 0.0;
  out.ase = out.p_active * scenario.lambda_b * p *
            std::log2(1.0 + scenario.sir_threshold);
  return out;
}

}  // namespace udn
