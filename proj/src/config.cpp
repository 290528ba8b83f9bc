#include "ghostfringe/config.hpp"
#include "ghostfringe/table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ghostfringe {

namespace {

enum class Domain { any, positive, non_negative };

struct KeySpec {
  std::function<void(RunConfig &, const std::string &, const std::string &)> parse;
  std::function<nlohmann::ordered_json(const RunConfig &)> dump;
};

[[noreturn]] void bad_value(const std::string &key, const std::string &value, const char *want) {
  throw ConfigError("key '" + key + "': expected " + want + ", got '" + value + "'", key);
}

double to_double(const std::string &key, const std::string &value, Domain domain) {
  char *end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v))
    bad_value(key, value, "a finite number");
  if (domain == Domain::positive && !(v > 0.0))
    bad_value(key, value, "a positive number");
  if (domain == Domain::non_negative && !(v >= 0.0))
    bad_value(key, value, "a non-negative number");
  return v;
}

template <class Int> Int to_integer(const std::string &key, const std::string &value) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size())
    bad_value(key, value, "a non-negative integer");
  return v;
}

bool to_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1")
    return true;
  if (value == "false" || value == "0")
    return false;
  bad_value(key, value, "true or false");
}

KeySpec real(double RunConfig::*m, Domain d) {
  return {[m, d](RunConfig &c, const std::string &k, const std::string &v) { c.*m = to_double(k, v, d); },
          [m](const RunConfig &c) { return nlohmann::ordered_json(c.*m); }};
}

template <class Int> KeySpec integer(Int RunConfig::*m) {
  return {[m](RunConfig &c, const std::string &k, const std::string &v) { c.*m = to_integer<Int>(k, v); },
          [m](const RunConfig &c) { return nlohmann::ordered_json(c.*m); }};
}

KeySpec flag(bool RunConfig::*m) {
  return {[m](RunConfig &c, const std::string &k, const std::string &v) { c.*m = to_bool(k, v); },
          [m](const RunConfig &c) { return nlohmann::ordered_json(c.*m); }};
}

KeySpec text(std::string RunConfig::*m) {
  return {[m](RunConfig &c, const std::string &, const std::string &v) { c.*m = v; },
          [m](const RunConfig &c) { return nlohmann::ordered_json(c.*m); }};
}

// Ordered as they appear in reports.
const std::vector<std::pair<std::string, KeySpec>> &registry() {
  static const std::vector<std::pair<std::string, KeySpec>> keys = {
      {"wavelength_m", real(&RunConfig::wavelength_m, Domain::positive)},
      {"source_to_bs_m", real(&RunConfig::source_to_bs_m, Domain::non_negative)},
      {"bs_to_aperture_arm1_m", real(&RunConfig::bs_to_aperture_arm1_m, Domain::non_negative)},
      {"bs_to_aperture_arm2_m", real(&RunConfig::bs_to_aperture_arm2_m, Domain::non_negative)},
      {"bs_to_detector_arm1_m", real(&RunConfig::bs_to_detector_arm1_m, Domain::positive)},
      {"bs_to_detector_arm2_m", real(&RunConfig::bs_to_detector_arm2_m, Domain::positive)},
      {"slit_width_m", real(&RunConfig::slit_width_m, Domain::positive)},
      {"slit_separation_m", real(&RunConfig::slit_separation_m, Domain::positive)},
      {"aperture_model",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          if (v == "canonical")
            c.aperture_model = ApertureModel::canonical;
          else if (v == "files")
            c.aperture_model = ApertureModel::files;
          else
            bad_value(k, v, "canonical or files");
        },
        [](const RunConfig &c) {
          return nlohmann::ordered_json(c.aperture_model == ApertureModel::canonical ? "canonical"
                                                                                     : "files");
        }}},
      {"outer_support_m", real(&RunConfig::outer_support_m, Domain::positive)},
      {"aperture_arm1_file", text(&RunConfig::aperture_arm1_file)},
      {"aperture_arm2_file", text(&RunConfig::aperture_arm2_file)},
      {"source_strength", real(&RunConfig::source_strength, Domain::positive)},
      {"correlation_length_m", real(&RunConfig::correlation_length_m, Domain::non_negative)},
      {"envelope_width_m", real(&RunConfig::envelope_width_m, Domain::positive)},
      {"grid_window_m", real(&RunConfig::grid_window_m, Domain::positive)},
      {"grid_samples", integer(&RunConfig::grid_samples)},
      {"frames", integer(&RunConfig::frames)},
      {"master_seed", integer(&RunConfig::master_seed)},
      {"probe_arm",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          if (v == "1")
            c.probe_arm = Arm::one;
          else if (v == "2")
            c.probe_arm = Arm::two;
          else
            bad_value(k, v, "1 or 2");
        },
        [](const RunConfig &c) { return nlohmann::ordered_json(arm_number(c.probe_arm)); }}},
      {"probe_position_m", real(&RunConfig::probe_position_m, Domain::any)},
      {"detector_half_width_m", real(&RunConfig::detector_half_width_m, Domain::positive)},
      {"field_diagnostics", flag(&RunConfig::field_diagnostics)},
      {"matrix_stride", integer(&RunConfig::matrix_stride)},
      {"workers", integer(&RunConfig::workers)},
      {"output_dir", text(&RunConfig::output_dir)},
      {"emit_csv", flag(&RunConfig::emit_csv)},
      {"emit_svg", flag(&RunConfig::emit_svg)},
      {"emit_json", flag(&RunConfig::emit_json)},
  };
  return keys;
}

const KeySpec *find_key(const std::string &key) {
  for (const auto &[name, spec] : registry())
    if (name == key)
      return &spec;
  return nullptr;
}

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class F> auto as_config_error(const char *what, F &&f) {
  try {
    return f();
  } catch (const InvalidArgument &e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

} // namespace

const std::set<std::string> &layout_keys() {
  static const std::set<std::string> keys = {
      "wavelength_m",          "source_to_bs_m",        "bs_to_aperture_arm1_m",
      "bs_to_aperture_arm2_m", "bs_to_detector_arm1_m", "bs_to_detector_arm2_m"};
  return keys;
}

const std::set<std::string> &physics_keys() {
  static const std::set<std::string> keys = [] {
    auto k = layout_keys();
    k.insert("slit_width_m");
    k.insert("slit_separation_m");
    return k;
  }();
  return keys;
}

ExperimentLayout RunConfig::layout() const {
  return as_config_error("layout", [&] {
    return ExperimentLayout(wavelength_m, source_to_bs_m,
                            {bs_to_aperture_arm1_m, bs_to_detector_arm1_m},
                            {bs_to_aperture_arm2_m, bs_to_detector_arm2_m});
  });
}

DoubleSlitSpec RunConfig::slit() const {
  DoubleSlitSpec s{slit_width_m, slit_separation_m};
  as_config_error("double slit", [&] {
    s.validate();
    return 0;
  });
  return s;
}

SourceSpec RunConfig::source() const {
  SourceSpec s{source_strength, correlation_length_m, envelope_width_m};
  as_config_error("source", [&] {
    s.validate();
    return 0;
  });
  return s;
}

SpatialGrid RunConfig::grid() const {
  return as_config_error("grid", [&] { return SpatialGrid(grid_window_m, grid_samples); });
}

Scenario RunConfig::scenario() const {
  const auto g = grid();
  const auto layout_ = layout();
  const auto slit_ = slit();
  const auto source_ = source();
  std::optional<AperturePair> apertures;
  if (aperture_model == ApertureModel::canonical) {
    apertures = as_config_error("apertures",
                                [&] { return canonical_aperture_pair(slit_, outer_support_m, g); });
  } else {
    if (aperture_arm1_file.empty() || aperture_arm2_file.empty())
      throw ConfigError("aperture_model=files needs aperture_arm1_file and aperture_arm2_file",
                        aperture_arm1_file.empty() ? "aperture_arm1_file" : "aperture_arm2_file");
    auto resolve = [&](const std::string &f) {
      std::filesystem::path p(f);
      return p.is_relative() ? base_dir / p : p;
    };
    apertures = AperturePair{load_aperture_file(resolve(aperture_arm1_file), g),
                             load_aperture_file(resolve(aperture_arm2_file), g)};
  }
  Scenario s{.layout = layout_, .apertures = *apertures, .source = source_, .grid = g};
  s.frames = frames;
  s.master_seed = master_seed;
  s.probe = {probe_arm, probe_position_m};
  s.detector_half_width = detector_half_width_m;
  s.field_diagnostics = field_diagnostics;
  s.matrix_stride = matrix_stride;
  return s;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  for (const auto &[name, spec] : registry())
    j[name] = spec.dump(*this);
  return j;
}

RunConfig parse_config(std::istream &in, const std::set<std::string> &required,
                       const std::string &origin) {
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto where = origin + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + "expected key = value, got '" + line + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const KeySpec *spec = find_key(key);
    if (!spec)
      throw ConfigError(where + "unknown key '" + key + "'", key);
    if (!seen.insert(key).second)
      throw ConfigError(where + "duplicate key '" + key + "'", key);
    try {
      spec->parse(config, key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what(), key);
    }
  }
  for (const auto &key : required)
    if (!seen.count(key))
      throw ConfigError(origin + ": missing mandatory key '" + key + "'", key);
  return config;
}

RunConfig load_config(const std::filesystem::path &path, const std::set<std::string> &required) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path.string());
  auto config = parse_config(in, required, path.string());
  config.base_dir = path.parent_path();
  return config;
}

ApertureProfile load_aperture_file(const std::filesystem::path &path, const SpatialGrid &grid) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open aperture file " + path.string());
  const auto table = read_table(in, aperture_csv_header, path.string());
  if (table.rows.size() != grid.samples())
    throw DataError(path.string() + ": " + std::to_string(table.rows.size()) +
                    " rows, grid has " + std::to_string(grid.samples()) + " samples");
  std::vector<double> t(grid.samples());
  const double tol = 1e-3 * grid.spacing();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(table.rows[i][0] - grid.coordinate(i)) > tol)
      throw DataError(path.string() + ":" + std::to_string(i + 2) +
                          ": x_m does not match grid coordinate",
                      i + 2);
    t[i] = table.rows[i][1];
  }
  try {
    return ApertureProfile(grid, std::move(t));
  } catch (const InvalidArgument &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

} // namespace ghostfringe
