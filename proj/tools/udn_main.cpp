// Command line front end: single-point coverage, figure sweeps, Monte Carlo
// runs, and the release-gate validation suite.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udn/analysis.hpp"
#include "udn/montecarlo.hpp"
#include "udn/pathloss.hpp"
#include "udn/sweep.hpp"
#include "udn/validation.hpp"

namespace {

constexpr double kM2PerKm2 = 1e6;  // exact in binary, so km^2 values round trip

double parse_lambda_u(const std::string& text) {
  if (text == "inf" || text == "full" || text == "full_load") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) {
    throw std::invalid_argument("bad lambda_u value: " + text);
  }
  return value;
}

struct ModelOptions {
  std::string variant = "bounded_dual_slope";
  double r_b = 1.0;
  double r_c = 70.0;
  double alpha_near = 2.5;
  double alpha_far = 4.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", variant,
                    "path loss variant: bounded_dual_slope, "
                    "bounded_single_slope, unbounded_single_slope, "
                    "unbounded_dual_slope")
        ->capture_default_str();
    cmd->add_option("--r-b", r_b, "constant-gain core radius in meters")
        ->capture_default_str();
    cmd->add_option("--r-c", r_c, "critical distance in meters")
        ->capture_default_str();
    cmd->add_option("--alpha-near", alpha_near, "near-field exponent")
        ->capture_default_str();
    cmd->add_option("--alpha-far", alpha_far, "far-field exponent")
        ->capture_default_str();
  }

  udn::PathLossModel build() const {
    const udn::PathLossModel model = udn::PathLossModel::make(
        udn::path_loss_variant_from_string(variant), r_b, r_c, alpha_near,
        alpha_far);
    if (model.discontinuous_at_bound()) {
      std::cerr << "warning: r_b = " << model.bounded_radius()
                << " m makes the attenuation law jump from 1 to r_b^-"
                << model.near_exponent()
                << " at the core boundary; it is evaluated as written\n";
    }
    return model;
  }
};

int run_coverage(const ModelOptions& model_opts, double lambda_b_km2,
                 const std::string& lambda_u_text, double threshold_db,
                 const std::string& method) {
  const udn::PathLossModel model = model_opts.build();
  udn::NetworkScenario scenario;
  scenario.lambda_b = lambda_b_km2 / kM2PerKm2;
  const double lu_km2 = parse_lambda_u(lambda_u_text);
  scenario.lambda_u = std::isinf(lu_km2)
                          ? udn::NetworkScenario::full_load()
                          : lu_km2 / kM2PerKm2;
  scenario.sir_threshold = std::pow(10.0, threshold_db / 10.0);

  std::cout.precision(10);
  const double pa = udn::active_probability(scenario);
  std::cout << "p_active " << pa << "\n";
  auto report = [&](const udn::CoverageResult& res) {
    const double ase = pa * scenario.lambda_b * res.value *
                       std::log2(1.0 + scenario.sir_threshold);
    std::cout << "coverage[" << udn::to_string(res.method) << "] "
              << res.value << "\n";
    std::cout << "ase_bps_hz_km2[" << udn::to_string(res.method) << "] "
              << ase * 1e6 << "\n";
  };
  if (method == "exact") {
    report(udn::coverage_exact(model, scenario));
  } else if (method == "bounds") {
    const udn::CoverageBounds bounds = udn::coverage_bounds(model, scenario);
    report(bounds.lower);
    report(bounds.upper);
  } else if (method == "asymptotic") {
    report(udn::coverage_asymptotic(model, scenario.lambda_u,
                                    scenario.sir_threshold));
  } else if (method == "general") {
    report(udn::coverage_general(model, scenario));
  } else {
    throw std::invalid_argument(
        "method must be exact, bounds, asymptotic or general");
  }
  return 0;
}

int run_simulate(const ModelOptions& model_opts, double lambda_b_km2,
                 const std::string& lambda_u_text, double threshold_db,
                 const udn::SimConfig& config) {
  const udn::PathLossModel model = model_opts.build();
  udn::NetworkScenario scenario;
  scenario.lambda_b = lambda_b_km2 / kM2PerKm2;
  const double lu_km2 = parse_lambda_u(lambda_u_text);
  scenario.lambda_u = std::isinf(lu_km2)
                          ? udn::NetworkScenario::full_load()
                          : lu_km2 / kM2PerKm2;
  scenario.sir_threshold = std::pow(10.0, threshold_db / 10.0);

  const udn::SimResult result =
      udn::estimate_coverage(model, scenario, config);
  std::cout.precision(10);
  std::cout << "coverage " << result.coverage.value << "\n";
  std::cout << "ci_halfwidth " << result.coverage.half_width.value_or(0.0)
            << "\n";
  std::cout << "p_active_empirical " << result.p_active << "\n";
  std::cout << "ase_bps_hz_km2 " << result.ase * 1e6 << "\n";
  std::cout << "window_radius_m " << result.window_radius << "\n";
  std::cout << "trials " << result.trials << "\n";
  std::cout << "resampled_trials " << result.resampled_trials << "\n";
  std::cout << "flagged_fraction " << result.flagged_fraction << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Coverage probability and area spectral efficiency of ultra-dense "
      "cellular networks under a bounded dual-slope path loss law"};
  app.require_subcommand(1);

  // --- coverage -----------------------------------------------------------
  auto* coverage = app.add_subcommand(
      "coverage", "evaluate one (lambda_b, lambda_u) point analytically");
  ModelOptions cov_model;
  cov_model.attach(coverage);
  double cov_lb = 0.0;
  std::string cov_lu;
  double cov_db = 10.0;
  std::string cov_method = "exact";
  coverage->add_option("--lambda-b", cov_lb, "stations per km^2")
      ->required();
  coverage
      ->add_option("--lambda-u", cov_lu,
                   "users per km^2, or inf for full load")
      ->required();
  coverage->add_option("--threshold-db", cov_db, "SIR threshold in dB")
      ->capture_default_str();
  coverage
      ->add_option("--method", cov_method,
                   "exact, bounds, asymptotic or general")
      ->capture_default_str();

  // --- simulate -------------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo coverage estimate for one point");
  ModelOptions sim_model;
  sim_model.attach(simulate);
  double sim_lb = 0.0;
  std::string sim_lu;
  double sim_db = 10.0;
  udn::SimConfig sim_config;
  std::string sim_load_mode = "exact_voronoi";
  simulate->add_option("--lambda-b", sim_lb, "stations per km^2")
      ->required();
  simulate
      ->add_option("--lambda-u", sim_lu,
                   "users per km^2, or inf for full load")
      ->required();
  simulate->add_option("--threshold-db", sim_db, "SIR threshold in dB")
      ->capture_default_str();
  simulate->add_option("--trials", sim_config.trials, "number of trials")
      ->capture_default_str();
  simulate->add_option("--seed", sim_config.master_seed, "master seed")
      ->capture_default_str();
  simulate
      ->add_option("--window", sim_config.window_radius,
                   "window radius in meters, 0 = automatic")
      ->capture_default_str();
  simulate
      ->add_option("--load-mode", sim_load_mode,
                   "exact_voronoi or independent_thinning")
      ->capture_default_str();
  simulate
      ->add_option("--min-bs", sim_config.min_expected_bs,
                   "minimum expected stations for automatic windows")
      ->capture_default_str();
  simulate->add_option("--threads", sim_config.threads,
                       "worker threads, 0 = hardware")
      ->capture_default_str();

  // --- sweep ----------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "evaluate a density grid and write a CSV dataset");
  ModelOptions sweep_model;
  sweep_model.attach(sweep);
  std::string config_path;
  std::vector<double> sweep_lb;
  std::vector<std::string> sweep_lu;
  std::vector<std::string> sweep_models;
  std::vector<std::string> sweep_methods;
  double sweep_db = 10.0;
  std::string sweep_output;
  bool sweep_timing = false;
  unsigned sweep_threads = 0;
  udn::SimConfig sweep_sim;
  std::string sweep_load_mode = "exact_voronoi";
  sweep->add_option("--config", config_path,
                    "JSON experiment manifest (flags override it)");
  sweep->add_option("--lambda-b", sweep_lb, "stations per km^2 grid");
  sweep->add_option("--lambda-u", sweep_lu,
                    "users per km^2 list; inf for full load");
  sweep->add_option("--models", sweep_models, "path loss variants");
  sweep->add_option("--methods", sweep_methods,
                    "subset of exact, bounds, asymptotic, general, "
                    "montecarlo");
  sweep->add_option("--threshold-db", sweep_db, "SIR threshold in dB");
  sweep->add_option("--output", sweep_output, "CSV output path");
  sweep->add_flag("--timing", sweep_timing,
                  "record wall time per row instead of 0 (breaks bytewise "
                  "reproducibility of the CSV)");
  sweep->add_option("--threads", sweep_threads,
                    "threads for analytic grid points, 0 = hardware");
  sweep->add_option("--trials", sweep_sim.trials, "Monte Carlo trials");
  sweep->add_option("--seed", sweep_sim.master_seed, "Monte Carlo seed");
  sweep->add_option("--window", sweep_sim.window_radius,
                    "Monte Carlo window radius in meters, 0 = automatic");
  sweep->add_option("--load-mode", sweep_load_mode,
                    "exact_voronoi or independent_thinning");
  sweep->add_option("--min-bs", sweep_sim.min_expected_bs,
                    "minimum expected stations for automatic windows");
  sweep->add_option("--sim-threads", sweep_sim.threads,
                    "Monte Carlo worker threads, 0 = hardware");

  // --- validate ---------------------------------------------------------
  auto* validate = app.add_subcommand(
      "validate", "run the release-gate checks and report pass/fail");
  std::string validate_output;
  std::vector<int> validate_only;
  validate->add_option("--output", validate_output,
                       "also write the report to this file");
  validate->add_option("--only", validate_only,
                       "run only these criterion ids (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (coverage->parsed()) {
      return run_coverage(cov_model, cov_lb, cov_lu, cov_db, cov_method);
    }
    if (simulate->parsed()) {
      sim_config.load_mode = udn::load_mode_from_string(sim_load_mode);
      return run_simulate(sim_model, sim_lb, sim_lu, sim_db, sim_config);
    }
    if (sweep->parsed()) {
      udn::SweepSpec spec;
      if (!config_path.empty()) {
        std::ifstream file(config_path);
        if (!file) {
          throw std::invalid_argument("cannot read config " + config_path);
        }
        std::ostringstream buffer;
        buffer << file.rdbuf();
        spec = udn::sweep_spec_from_json(buffer.str());
      }
      if (!sweep_lb.empty()) spec.lambda_b_per_km2 = sweep_lb;
      if (!sweep_lu.empty()) {
        spec.lambda_u_per_km2.clear();
        for (const std::string& text : sweep_lu) {
          spec.lambda_u_per_km2.push_back(parse_lambda_u(text));
        }
      }
      if (!sweep_models.empty()) {
        spec.models.clear();
        for (const std::string& name : sweep_models) {
          spec.models.push_back(udn::path_loss_variant_from_string(name));
        }
      }
      if (!sweep_methods.empty()) {
        spec.methods.clear();
        for (const std::string& name : sweep_methods) {
          spec.methods.push_back(udn::sweep_method_from_string(name));
        }
      }
      if (sweep->count("--threshold-db") > 0) spec.threshold_db = sweep_db;
      if (sweep->count("--model") > 0 || sweep->count("--r-b") > 0 ||
          sweep->count("--r-c") > 0 || sweep->count("--alpha-near") > 0 ||
          sweep->count("--alpha-far") > 0) {
        spec.r_b_m = sweep_model.r_b;
        spec.r_c_m = sweep_model.r_c;
        spec.alpha_near = sweep_model.alpha_near;
        spec.alpha_far = sweep_model.alpha_far;
        if (sweep->count("--model") > 0) {
          spec.models = {
              udn::path_loss_variant_from_string(sweep_model.variant)};
        }
      }
      if (!sweep_output.empty()) spec.output_path = sweep_output;
      if (sweep->count("--timing") > 0) spec.timing = sweep_timing;
      if (sweep->count("--threads") > 0) spec.threads = sweep_threads;
      const bool wants_mc =
          std::find(spec.methods.begin(), spec.methods.end(),
                    udn::SweepMethod::MonteCarlo) != spec.methods.end();
      if (wants_mc) {
        udn::SimConfig sim = spec.sim.value_or(udn::SimConfig{});
        if (sweep->count("--trials") > 0) sim.trials = sweep_sim.trials;
        if (sweep->count("--seed") > 0) {
          sim.master_seed = sweep_sim.master_seed;
        }
        if (sweep->count("--window") > 0) {
          sim.window_radius = sweep_sim.window_radius;
        }
        if (sweep->count("--load-mode") > 0) {
          sim.load_mode = udn::load_mode_from_string(sweep_load_mode);
        }
        if (sweep->count("--min-bs") > 0) {
          sim.min_expected_bs = sweep_sim.min_expected_bs;
        }
        if (sweep->count("--sim-threads") > 0) {
          sim.threads = sweep_sim.threads;
        }
        spec.sim = sim;
      }
      if (spec.output_path.empty()) {
        throw std::invalid_argument(
            "no output path given (use --output or the config file)");
      }
      for (udn::PathLossVariant v : spec.models) {
        if (spec.make_model(v).discontinuous_at_bound()) {
          std::cerr << "warning: r_b = " << spec.r_b_m
                    << " m makes the attenuation law discontinuous at the "
                       "core boundary; it is evaluated as written\n";
          break;
        }
      }
      const udn::SweepOutput output = udn::run_sweep(spec);
      udn::write_sweep_files(spec, output);
      std::cout << "wrote " << output.rows.size() << " rows to "
                << spec.output_path << " (metadata in " << spec.output_path
                << ".meta.txt)\n";
      return 0;
    }
    if (validate->parsed()) {
      const std::vector<udn::CriterionResult> results =
          udn::run_acceptance_suite(&std::cerr, validate_only);
      const std::string report = udn::acceptance_report(results);
      std::cout << report;
      if (!validate_output.empty()) {
        std::ofstream file(validate_output);
        if (!file) {
          throw std::runtime_error("cannot write " + validate_output);
        }
        file << report;
      }
      const bool all_passed =
          std::all_of(results.begin(), results.end(),
                      [](const udn::CriterionResult& r) { return r.passed; });
      return all_passed ? 0 : 3;
    }
  } catch (const udn::ConvergenceError& e) {
    std::cerr << "numeric convergence failure: " << e.what()
              << " (best estimate " << e.best_estimate() << ", error bound "
              << e.error_bound() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
