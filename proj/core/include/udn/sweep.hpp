#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "udn/analysis.hpp"
#include "udn/montecarlo.hpp"
#include "udn/pathloss.hpp"

namespace udn {

enum class SweepMethod { Exact, Bounds, Asymptotic, General, MonteCarlo };

std::string_view to_string(SweepMethod m);
SweepMethod sweep_method_from_string(std::string_view name);

/// A figure-reproduction experiment: a density grid crossed with path loss
/// variants and evaluation methods. Densities cross this boundary in per-km^2
/// units; everything behind it runs in SI.
struct SweepSpec {
  std::vector<double> lambda_b_per_km2;
  std::vector<double> lambda_u_per_km2;  // +inf entries mean full load
  std::vector<PathLossVariant> models = {PathLossVariant::BoundedDualSlope};
  double r_b_m = 1.0;
  double r_c_m = 70.0;
  double alpha_near = 2.5;
  double alpha_far = 4.0;
  double threshold_db = 10.0;
  std::vector<SweepMethod> methods = {SweepMethod::Exact};
  std::optional<SimConfig> sim;  // required when methods include MonteCarlo
  std::string output_path;       // empty = caller handles output
  bool timing = false;           // keep runtime_ms at 0 for bytewise replays
  QuadratureSpec quad;
  unsigned threads = 0;  // analytic grid dispatch; 0 = hardware

  PathLossModel make_model(PathLossVariant variant) const;
  double threshold_linear() const;
  void validate() const;
};

struct SweepRow {
  double lambda_b_m2 = 0.0;
  double lambda_u_m2 = 0.0;  // +inf for full load
  PathLossVariant model = PathLossVariant::BoundedDualSlope;
  CoverageMethod method = CoverageMethod::ExactIntegral;
  double p_active = 0.0;
  double coverage = 0.0;
  std::optional<double> ci_half_width;
  double ase_m2 = 0.0;  // bit/s/Hz per m^2
  double runtime_ms = 0.0;
};

struct SweepOutput {
  std::vector<SweepRow> rows;  // sorted by (lambda_b, lambda_u, model, method)
  std::string csv;
  std::string sidecar;  // run metadata, not byte-stable across runs
};

/// Evaluate the whole grid. Analytic points run concurrently; Monte Carlo
/// points run one at a time with trial-level parallelism. Numeric failures
/// abort with the offending grid point named in the exception message.
SweepOutput run_sweep(const SweepSpec& spec);

/// Write output.csv to spec.output_path and the sidecar next to it.
void write_sweep_files(const SweepSpec& spec, const SweepOutput& output);

std::string sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const std::string& text);

/// Render rows in the CSV column contract used by run_sweep.
std::string rows_to_csv(const std::vector<SweepRow>& rows);

/// Locale-independent shortest-round-trip formatting used by the CSV writer.
std::string format_double(double value);

}  // namespace udn
