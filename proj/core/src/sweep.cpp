#include "udn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace udn {

namespace {

constexpr double kM2PerKm2 = 1e6;  // exact in binary, so km^2 values round trip

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from) {
  return std::chrono::duration<double, std::milli>(Clock::now() - from)
      .count();
}

std::string point_label(double lb_km2, double lu_km2, PathLossVariant model,
                        std::string_view method) {
  std::ostringstream os;
  os << "lambda_b=" << lb_km2 << "/km2 lambda_u=";
  if (std::isinf(lu_km2)) {
    os << "full_load";
  } else {
    os << lu_km2 << "/km2";
  }
  os << " model=" << to_string(model) << " method=" << method;
  return os.str();
}

}  // namespace

std::string_view to_string(SweepMethod m) {
  switch (m) {
    case SweepMethod::Exact:
      return "exact";
    case SweepMethod::Bounds:
      return "bounds";
    case SweepMethod::Asymptotic:
      return "asymptotic";
    case SweepMethod::General:
      return "general";
    case SweepMethod::MonteCarlo:
      return "montecarlo";
  }
  return "unknown";
}

SweepMethod sweep_method_from_string(std::string_view name) {
  if (name == "exact") return SweepMethod::Exact;
  if (name == "bounds") return SweepMethod::Bounds;
  if (name == "asymptotic") return SweepMethod::Asymptotic;
  if (name == "general") return SweepMethod::General;
  if (name == "montecarlo") return SweepMethod::MonteCarlo;
  throw std::invalid_argument("unknown sweep method: " + std::string(name));
}

PathLossModel SweepSpec::make_model(PathLossVariant variant) const {
  return PathLossModel::make(variant, r_b_m, r_c_m, alpha_near, alpha_far);
}

double SweepSpec::threshold_linear() const {
  return std::pow(10.0, threshold_db / 10.0);
}

void SweepSpec::validate() const {
  if (lambda_b_per_km2.empty() || lambda_u_per_km2.empty() || models.empty() ||
      methods.empty()) {
    throw std::invalid_argument(
        "sweep grids (lambda_b, lambda_u, models, methods) must be non-empty");
  }
  for (double lb : lambda_b_per_km2) {
    if (!(std::isfinite(lb) && lb > 0.0)) {
      throw std::invalid_argument("lambda_b grid values must be positive");
    }
  }
  for (double lu : lambda_u_per_km2) {
    if (std::isnan(lu) || lu < 0.0) {
      throw std::invalid_argument(
          "lambda_u grid values must be >= 0 or inf for full load");
    }
  }
  if (!std::isfinite(threshold_db)) {
    throw std::invalid_argument("threshold_db must be finite");
  }
  const bool wants_mc =
      std::find(methods.begin(), methods.end(), SweepMethod::MonteCarlo) !=
      methods.end();
  if (wants_mc && !sim.has_value()) {
    throw std::invalid_argument(
        "montecarlo method requested but no sim config given");
  }
  for (PathLossVariant v : models) {
    (void)make_model(v);  // parameter validation
  }
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

bool method_applies(SweepMethod method, PathLossVariant variant) {
  switch (method) {
    case SweepMethod::Exact:
    case SweepMethod::Bounds:
    case SweepMethod::Asymptotic:
      return variant == PathLossVariant::BoundedDualSlope;
    case SweepMethod::General:
    case SweepMethod::MonteCarlo:
      return true;
  }
  return false;
}

struct Task {
  double lb_km2;
  double lu_km2;
  PathLossVariant variant;
  SweepMethod method;
};

struct McPointMeta {
  std::string label;
  double window_radius;
  long resampled_trials;
  double flagged_fraction;
};

std::vector<SweepRow> evaluate_task(const SweepSpec& spec, const Task& task,
                                    std::vector<McPointMeta>* mc_meta,
                                    std::mutex* mc_meta_mutex) {
  const double T = spec.threshold_linear();
  const PathLossModel model = spec.make_model(task.variant);
  NetworkScenario scenario;
  scenario.lambda_b = task.lb_km2 / kM2PerKm2;
  scenario.lambda_u = std::isinf(task.lu_km2) ? NetworkScenario::full_load()
                                              : task.lu_km2 / kM2PerKm2;
  scenario.sir_threshold = T;

  const double rate = std::log2(1.0 + T);
  const auto started = Clock::now();
  std::vector<SweepRow> rows;

  auto emit = [&](CoverageMethod cm, double coverage,
                  std::optional<double> ci, double p_active, double ase) {
    SweepRow row;
    row.lambda_b_m2 = scenario.lambda_b;
    row.lambda_u_m2 = scenario.lambda_u;
    row.model = task.variant;
    row.method = cm;
    row.p_active = p_active;
    row.coverage = coverage;
    row.ci_half_width = ci;
    row.ase_m2 = ase;
    rows.push_back(row);
  };

  switch (task.method) {
    case SweepMethod::Exact: {
      const double pa = active_probability(scenario);
      const auto res = coverage_exact(model, scenario, spec.quad);
      emit(res.method, res.value, std::nullopt, pa,
           pa * scenario.lambda_b * res.value * rate);
      break;
    }
    case SweepMethod::Bounds: {
      const double pa = active_probability(scenario);
      const auto bounds = coverage_bounds(model, scenario);
      emit(bounds.lower.method, bounds.lower.value, std::nullopt, pa,
           pa * scenario.lambda_b * bounds.lower.value * rate);
      emit(bounds.upper.method, bounds.upper.value, std::nullopt, pa,
           pa * scenario.lambda_b * bounds.upper.value * rate);
      break;
    }
    case SweepMethod::Asymptotic: {
      const double pa = active_probability(scenario);
      const auto res = coverage_asymptotic(model, scenario.lambda_u, T);
      emit(res.method, res.value, std::nullopt, pa,
           pa * scenario.lambda_b * res.value * rate);
      break;
    }
    case SweepMethod::General: {
      const double pa = active_probability(scenario);
      const auto res = coverage_general(model, scenario, spec.quad);
      emit(res.method, res.value, std::nullopt, pa,
           pa * scenario.lambda_b * res.value * rate);
      break;
    }
    case SweepMethod::MonteCarlo: {
      const SimResult sim = estimate_coverage(model, scenario, *spec.sim);
      emit(sim.coverage.method, sim.coverage.value, sim.coverage.half_width,
           sim.p_active, sim.ase);
      if (mc_meta != nullptr) {
        McPointMeta meta;
        meta.label = point_label(task.lb_km2, task.lu_km2, task.variant,
                                 to_string(task.method));
        meta.window_radius = sim.window_radius;
        meta.resampled_trials = sim.resampled_trials;
        meta.flagged_fraction = sim.flagged_fraction;
        std::lock_guard<std::mutex> lock(*mc_meta_mutex);
        mc_meta->push_back(std::move(meta));
      }
      break;
    }
  }

  const double ms = elapsed_ms(started);
  for (auto& row : rows) {
    row.runtime_ms = spec.timing ? ms : 0.0;
  }
  return rows;
}

}  // namespace

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  std::string csv =
      "lambda_b_per_km2,lambda_u_per_km2,model,method,p_active,coverage,"
      "coverage_ci_halfwidth,ase_bps_hz_km2,runtime_ms\n";
  for (const SweepRow& row : rows) {
    csv += format_double(row.lambda_b_m2 * 1e6);
    csv += ',';
    csv += format_double(row.lambda_u_m2 * 1e6);
    csv += ',';
    csv += to_string(row.model);
    csv += ',';
    csv += to_string(row.method);
    csv += ',';
    csv += format_double(row.p_active);
    csv += ',';
    csv += format_double(row.coverage);
    csv += ',';
    if (row.ci_half_width.has_value()) csv += format_double(*row.ci_half_width);
    csv += ',';
    csv += format_double(row.ase_m2 * 1e6);
    csv += ',';
    csv += format_double(row.runtime_ms);
    csv += '\n';
  }
  return csv;
}

namespace {

std::string make_sidecar(const SweepSpec& spec,
                         const std::vector<McPointMeta>& mc_meta,
                         double wall_ms, unsigned analytic_threads) {
  std::ostringstream os;
  os << "udn sweep run metadata\n";
  os << "generator: mt19937_64 with splitmix64 per-trial substreams "
        "(libstdc++ distributions)\n";
  os << "quadrature: rel_tol=" << spec.quad.rel_tol
     << " abs_tol=" << spec.quad.abs_tol
     << " max_subdivisions=" << spec.quad.max_subdivisions << "\n";
  os << "analytic_threads: " << analytic_threads << "\n";
  if (spec.sim.has_value()) {
    os << "sim: trials=" << spec.sim->trials
       << " master_seed=" << spec.sim->master_seed
       << " load_mode=" << to_string(spec.sim->load_mode)
       << " min_expected_bs=" << spec.sim->min_expected_bs
       << " threads=" << spec.sim->threads << "\n";
  }
  for (const McPointMeta& meta : mc_meta) {
    os << "mc_point: " << meta.label
       << " window_radius_m=" << meta.window_radius
       << " resampled_trials=" << meta.resampled_trials
       << " flagged_fraction=" << meta.flagged_fraction << "\n";
  }
  os << "wall_ms: " << wall_ms << "\n";
  os << "spec: " << sweep_spec_to_json(spec) << "\n";
  return os.str();
}

}  // namespace

SweepOutput run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto started = Clock::now();

  std::vector<Task> analytic_tasks;
  std::vector<Task> mc_tasks;
  for (double lb : spec.lambda_b_per_km2) {
    for (double lu : spec.lambda_u_per_km2) {
      for (PathLossVariant variant : spec.models) {
        for (SweepMethod method : spec.methods) {
          if (!method_applies(method, variant)) continue;
          Task task{lb, lu, variant, method};
          (method == SweepMethod::MonteCarlo ? mc_tasks : analytic_tasks)
              .push_back(task);
        }
      }
    }
  }

  if (analytic_tasks.empty() && mc_tasks.empty()) {
    throw std::invalid_argument(
        "no applicable (model, method) combinations: exact, bounds and "
        "asymptotic require the bounded_dual_slope model");
  }

  std::vector<std::vector<SweepRow>> results(analytic_tasks.size());
  std::vector<McPointMeta> mc_meta;
  std::mutex mc_meta_mutex;

  auto guarded_evaluate = [&](const Task& task) {
    try {
      return evaluate_task(spec, task, &mc_meta, &mc_meta_mutex);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(
          "at grid point " +
              point_label(task.lb_km2, task.lu_km2, task.variant,
                          to_string(task.method)) +
              ": " + e.what(),
          e.best_estimate(), e.error_bound());
    } catch (const std::exception& e) {
      throw std::runtime_error(
          "at grid point " +
          point_label(task.lb_km2, task.lu_km2, task.variant,
                      to_string(task.method)) +
          ": " + e.what());
    }
  };

  unsigned n_threads = spec.threads != 0
                           ? spec.threads
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(
      n_threads, static_cast<unsigned>(std::max<std::size_t>(
                     analytic_tasks.size(), 1)));

  if (analytic_tasks.size() <= 1 || n_threads <= 1) {
    for (std::size_t i = 0; i < analytic_tasks.size(); ++i) {
      results[i] = guarded_evaluate(analytic_tasks[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next.fetch_add(1); i < analytic_tasks.size();
               i = next.fetch_add(1)) {
            results[i] = guarded_evaluate(analytic_tasks[i]);
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

  // Monte Carlo points run one at a time; each parallelizes its own trials.
  std::vector<std::vector<SweepRow>> mc_results(mc_tasks.size());
  for (std::size_t i = 0; i < mc_tasks.size(); ++i) {
    mc_results[i] = guarded_evaluate(mc_tasks[i]);
  }

  SweepOutput out;
  for (const auto& batch : results) {
    out.rows.insert(out.rows.end(), batch.begin(), batch.end());
  }
  for (const auto& batch : mc_results) {
    out.rows.insert(out.rows.end(), batch.begin(), batch.end());
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              return std::make_tuple(a.lambda_b_m2, a.lambda_u_m2,
                                     to_string(a.model), to_string(a.method)) <
                     std::make_tuple(b.lambda_b_m2, b.lambda_u_m2,
                                     to_string(b.model), to_string(b.method));
            });
  out.csv = rows_to_csv(out.rows);
  out.sidecar = make_sidecar(spec, mc_meta, elapsed_ms(started), n_threads);
  return out;
}

void write_sweep_files(const SweepSpec& spec, const SweepOutput& output) {
  if (spec.output_path.empty()) {
    throw std::invalid_argument("sweep output path is empty");
  }
  {
    std::ofstream file(spec.output_path, std::ios::binary);
    if (!file) {
      throw std::runtime_error("cannot write " + spec.output_path);
    }
    file << output.csv;
  }
  const std::string meta_path = spec.output_path + ".meta.txt";
  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) {
    throw std::runtime_error("cannot write " + meta_path);
  }
  meta << output.sidecar;
}

namespace {

using nlohmann::json;

double lambda_u_from_json(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "full" || s == "full_load") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("bad lambda_u entry: " + s);
  }
  return v.get<double>();
}

}  // namespace

std::string sweep_spec_to_json(const SweepSpec& spec) {
  json j;
  j["lambda_b_per_km2"] = spec.lambda_b_per_km2;
  json lu = json::array();
  for (double v : spec.lambda_u_per_km2) {
    if (std::isinf(v)) {
      lu.push_back("inf");
    } else {
      lu.push_back(v);
    }
  }
  j["lambda_u_per_km2"] = lu;
  json models = json::array();
  for (PathLossVariant v : spec.models) models.push_back(to_string(v));
  j["models"] = models;
  j["pathloss"] = {{"r_b_m", spec.r_b_m},
                   {"r_c_m", spec.r_c_m},
                   {"alpha_near", spec.alpha_near},
                   {"alpha_far", spec.alpha_far}};
  j["threshold_db"] = spec.threshold_db;
  json methods = json::array();
  for (SweepMethod m : spec.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  if (spec.sim.has_value()) {
    j["sim"] = {{"trials", spec.sim->trials},
                {"master_seed", spec.sim->master_seed},
                {"window_radius_m", spec.sim->window_radius},
                {"load_mode", to_string(spec.sim->load_mode)},
                {"min_expected_bs", spec.sim->min_expected_bs},
                {"threads", spec.sim->threads}};
  }
  if (!spec.output_path.empty()) j["output_path"] = spec.output_path;
  j["timing"] = spec.timing;
  j["quadrature"] = {{"rel_tol", spec.quad.rel_tol},
                     {"abs_tol", spec.quad.abs_tol},
                     {"max_subdivisions", spec.quad.max_subdivisions}};
  j["threads"] = spec.threads;
  return j.dump();
}

SweepSpec sweep_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("bad sweep config JSON: ") +
                                e.what());
  }
  static const char* known[] = {
      "lambda_b_per_km2", "lambda_u_per_km2", "models",  "pathloss",
      "threshold_db",     "methods",          "sim",     "output_path",
      "timing",           "quadrature",       "threads",
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return it.key() == k;
        }) == std::end(known)) {
      throw std::invalid_argument("unknown sweep config key: " + it.key());
    }
  }

  SweepSpec spec;
  try {
    if (j.contains("lambda_b_per_km2")) {
      spec.lambda_b_per_km2 =
          j["lambda_b_per_km2"].get<std::vector<double>>();
    }
    if (j.contains("lambda_u_per_km2")) {
      spec.lambda_u_per_km2.clear();
      for (const auto& v : j["lambda_u_per_km2"]) {
        spec.lambda_u_per_km2.push_back(lambda_u_from_json(v));
      }
    }
    if (j.contains("models")) {
      spec.models.clear();
      for (const auto& v : j["models"]) {
        spec.models.push_back(
            path_loss_variant_from_string(v.get<std::string>()));
      }
    }
    if (j.contains("pathloss")) {
      const auto& p = j["pathloss"];
      spec.r_b_m = p.value("r_b_m", spec.r_b_m);
      spec.r_c_m = p.value("r_c_m", spec.r_c_m);
      spec.alpha_near = p.value("alpha_near", spec.alpha_near);
      spec.alpha_far = p.value("alpha_far", spec.alpha_far);
    }
    spec.threshold_db = j.value("threshold_db", spec.threshold_db);
    if (j.contains("methods")) {
      spec.methods.clear();
      for (const auto& v : j["methods"]) {
        spec.methods.push_back(
            sweep_method_from_string(v.get<std::string>()));
      }
    }
    if (j.contains("sim")) {
      SimConfig sim;
      const auto& s = j["sim"];
      sim.trials = s.value("trials", sim.trials);
      sim.master_seed = s.value("master_seed", sim.master_seed);
      sim.window_radius = s.value("window_radius_m", sim.window_radius);
      if (s.contains("load_mode")) {
        sim.load_mode =
            load_mode_from_string(s["load_mode"].get<std::string>());
      }
      sim.min_expected_bs = s.value("min_expected_bs", sim.min_expected_bs);
      sim.threads = s.value("threads", sim.threads);
      spec.sim = sim;
    }
    spec.output_path = j.value("output_path", spec.output_path);
    spec.timing = j.value("timing", spec.timing);
    if (j.contains("quadrature")) {
      const auto& q = j["quadrature"];
      spec.quad.rel_tol = q.value("rel_tol", spec.quad.rel_tol);
      spec.quad.abs_tol = q.value("abs_tol", spec.quad.abs_tol);
      spec.quad.max_subdivisions =
          q.value("max_subdivisions", spec.quad.max_subdivisions);
    }
    spec.threads = j.value("threads", spec.threads);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad sweep config value: ") +
                                e.what());
  }
  return spec;
}

}  // namespace udn
