#pragma once

#include "ghostfringe/errors.hpp"
#include "ghostfringe/speckle.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

namespace ghostfringe {

/// Malformed or incomplete run configuration. Names the offending key when
/// there is one.
class ConfigError : public Error {
public:
  ConfigError(const std::string &what, std::string key = {})
      : Error(what), key_(std::move(key)) {}
  const std::string &key() const noexcept { return key_; }

private:
  std::string key_;
};

enum class ApertureModel { canonical, files };

/// Flat key=value run description. Lengths are in metres and carry an `_m`
/// suffix in their key names.
struct RunConfig {
  // Layout
  double wavelength_m = 660e-9;
  double source_to_bs_m = 0.034;
  double bs_to_aperture_arm1_m = 0.047;
  double bs_to_aperture_arm2_m = 0.047;
  double bs_to_detector_arm1_m = 0.853;
  double bs_to_detector_arm2_m = 0.853;
  // Double slit and apertures
  double slit_width_m = 250e-6;
  double slit_separation_m = 670e-6;
  ApertureModel aperture_model = ApertureModel::canonical;
  double outer_support_m = 920e-6;
  std::string aperture_arm1_file;
  std::string aperture_arm2_file;
  // Source
  double source_strength = 1.0;
  double correlation_length_m = 5e-6;
  double envelope_width_m = 10e-3;
  // Grid and ensemble
  double grid_window_m = 0.12288;
  std::size_t grid_samples = 49152;
  std::size_t frames = 5000;
  std::uint64_t master_seed = 42;
  Arm probe_arm = Arm::one;
  double probe_position_m = 0.0;
  double detector_half_width_m = 10e-3;
  bool field_diagnostics = false;
  std::size_t matrix_stride = 0;
  unsigned workers = 0; ///< 0: one per hardware thread
  // Output
  std::string output_dir = "out";
  bool emit_csv = true;
  bool emit_svg = true;
  bool emit_json = true;

  /// Directory relative aperture files are resolved against.
  std::filesystem::path base_dir;

  ExperimentLayout layout() const;
  DoubleSlitSpec slit() const;
  SourceSpec source() const;
  SpatialGrid grid() const;
  /// Builds the apertures (reading sample files if requested) and the
  /// scenario. Throws ConfigError for unreadable aperture files.
  Scenario scenario() const;

  nlohmann::ordered_json to_json() const;
};

/// Keys that must appear in every simulation or analytic config.
const std::set<std::string> &physics_keys();
/// Keys cmd_fit needs to turn a period into a slit separation.
const std::set<std::string> &layout_keys();

/// Parses key=value lines; '#' starts a comment. Unknown, duplicate or
/// malformed keys and missing `required` keys raise ConfigError. Keys not
/// given keep their RunConfig defaults.
RunConfig parse_config(std::istream &in, const std::set<std::string> &required,
                       const std::string &origin = "<config>");
RunConfig load_config(const std::filesystem::path &path, const std::set<std::string> &required);

/// Reads an aperture transmission file (header `x_m,transmission`) whose
/// rows must coincide with the grid's sample coordinates.
ApertureProfile load_aperture_file(const std::filesystem::path &path, const SpatialGrid &grid);

} // namespace ghostfringe
