#pragma once

#include "ghostfringe/analytic.hpp"
#include "ghostfringe/config.hpp"
#include "ghostfringe/fringe_fit.hpp"
#include "ghostfringe/speckle.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace ghostfringe {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 2,
  exit_input_error = 3,
  exit_numeric_error = 4,
};

/// Maps a library error to the process exit code: configuration problems
/// 2, malformed input data 3, sampling/regime/rank failures 4.
int exit_code_for(const std::exception &e) noexcept;

/// Runs `body`, printing any error to `err` and translating it.
int run_guarded(const std::function<void()> &body, std::ostream &err);

/// (l_c / b)^2: smallness parameter of the broadband approximation.
double broadband_validity(double correlation_length, double slit_width);

struct AnalyticOutputs {
  FringeMetrics metrics;
  std::vector<double> positions;
  std::vector<double> g2;
};

/// Broadband closed-form g2 slice g2(probe, x2) over the detector pixels,
/// written to analytic_g2.csv with fringe_metrics.json and (optionally)
/// analytic_g2.svg. A finite correlation length in the config is ignored;
/// the closed form is its zero limit.
AnalyticOutputs cmd_analytic(const RunConfig &config, const std::filesystem::path &out_dir);

struct SimulationOutputs {
  Scenario scenario;
  CorrelationAccumulator accumulator;
  /// Indexed by scan arm: [0] g2(x1, probe), [1] g2(probe, x2).
  std::array<G2Slice, 2> slices;
  std::array<std::vector<double>, 2> model;
  std::array<SinglesProfile, 2> singles;
  std::optional<SiegertReport> siegert;
  double elapsed_seconds = 0.0;
};

/// Runs the ensemble and writes g2_scan_arm{1,2}.csv, singles_arm{1,2}.csv,
/// run_report.json and, on request, siegert.csv, g2_matrix.csv and SVG
/// overlays.
SimulationOutputs cmd_simulate(const RunConfig &config, const std::filesystem::path &out_dir);

struct FitOutputs {
  FringeSeed seed;
  FringeFitResult result;
  double distance = 0.0; ///< aperture-to-detector distance used for d and b
  double slit_separation = 0.0;
  double slit_width = 0.0;
};

/// Fits a g2 CSV and writes fit_report.json. The layout keys of `config`
/// fix lambda and the aperture-to-detector distance of `scan_arm`.
/// A non-converged fit is reported, not raised.
FitOutputs cmd_fit(const std::filesystem::path &csv, const RunConfig &config, Arm scan_arm,
                   const std::filesystem::path &out_dir);

} // namespace ghostfringe
