#include "ghostfringe/commands.hpp"
#include "ghostfringe/svg_plot.hpp"
#include "ghostfringe/table_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace ghostfringe {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void write_file(const fs::path &path, const std::string &contents) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write " + path.string(), "output_dir");
  out << contents;
  if (!out)
    throw ConfigError("failed writing " + path.string(), "output_dir");
}

// Accumulates outputs and writes them together once a command succeeded.
class OutputSet {
public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  void add(const std::string &name, std::string contents) {
    files_.emplace_back(name, std::move(contents));
  }
  void flush() const {
    for (const auto &[name, contents] : files_)
      write_file(dir_ / name, contents);
  }

private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const json &j) { return j.dump(2) + "\n"; }

json metrics_json(const FringeMetrics &m) {
  return json{{"period_m", m.period},
              {"envelope_first_zero_m", m.envelope_first_zero},
              {"visibility_factor", m.visibility_factor}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

SourceSpec broadband(SourceSpec s) {
  s.correlation_length = 0.0;
  return s;
}

// Broadband model for the slice scanning `scan` with the probe fixed in the
// other arm; NaN where the closed form does not apply.
std::vector<double> model_slice(const Scenario &s, const DoubleSlitSpec &slit, Arm scan,
                                const std::vector<double> &positions, double probe) {
  std::vector<double> out(positions.size(), nan);
  if (!s.layout.is_symmetric())
    return out;
  const auto src = broadband(s.source);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double x1 = scan == Arm::one ? positions[i] : probe;
    const double x2 = scan == Arm::one ? probe : positions[i];
    try {
      out[i] = g2_model(x1, x2, s.layout, s.apertures, slit, src);
    } catch (const UndefinedCorrelation &) {
    }
  }
  return out;
}

std::string table_text(const std::function<void(std::ostream &)> &writer) {
  std::ostringstream o;
  writer(o);
  return o.str();
}

std::string g2_overlay(const std::string &title, const std::vector<double> &x,
                       const std::vector<double> &data, const std::vector<double> &model,
                       const std::string &data_label, const std::string &model_label) {
  PlotSpec plot;
  plot.title = title;
  plot.x_label = "x (mm)";
  plot.y_label = "g2";
  plot.x_scale = 1e3;
  if (!data.empty())
    plot.series.push_back({data_label, x, data, PlotSeries::Style::markers, "#1f4e9c"});
  if (!model.empty())
    plot.series.push_back({model_label, x, model, PlotSeries::Style::line, "#c0392b"});
  return render_svg(plot);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0)
    return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

int exit_code_for(const std::exception &e) noexcept {
  if (dynamic_cast<const ConfigError *>(&e))
    return exit_config_error;
  if (dynamic_cast<const DataError *>(&e))
    return exit_input_error;
  if (dynamic_cast<const SamplingBoundError *>(&e) || dynamic_cast<const RegimeError *>(&e) ||
      dynamic_cast<const UndefinedCorrelation *>(&e) || dynamic_cast<const RankDeficiency *>(&e))
    return exit_numeric_error;
  if (dynamic_cast<const InvalidArgument *>(&e) || dynamic_cast<const GridMismatch *>(&e))
    return exit_config_error;
  if (dynamic_cast<const fs::filesystem_error *>(&e))
    return exit_config_error;
  return exit_numeric_error;
}

int run_guarded(const std::function<void()> &body, std::ostream &err) {
  try {
    body();
    return exit_ok;
  } catch (const SamplingBoundError &e) {
    err << "error: " << e.what() << "\n  sampling bound: " << e.bound() << " m\n";
    return exit_code_for(e);
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const DataError &e) {
    err << "input error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::bad_alloc &) {
    err << "error: out of memory\n";
    return exit_config_error;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

double broadband_validity(double correlation_length, double slit_width) {
  const double r = correlation_length / slit_width;
  return r * r;
}

AnalyticOutputs cmd_analytic(const RunConfig &config, const fs::path &out_dir) {
  const auto scenario = config.scenario();
  const auto slit = config.slit();
  const auto detector = DetectorRegion::centred(scenario.grid, scenario.detector_half_width);
  if (!scenario.layout.is_symmetric())
    throw RegimeError("the closed-form g2 needs equal distances in both arms");

  AnalyticOutputs result;
  result.metrics = fringe_metrics(scenario.layout, slit, scenario.apertures);
  result.positions = detector.coordinates();
  result.g2 = model_slice(scenario, slit, Arm::two, result.positions, scenario.probe.position);

  OutputSet out(out_dir);
  if (config.emit_csv) {
    G2Slice slice;
    slice.positions = result.positions;
    slice.g2 = result.g2;
    slice.standard_error.assign(result.g2.size(), 0.0);
    out.add("analytic_g2.csv",
            table_text([&](std::ostream &o) { write_g2_csv(o, slice, result.g2); }));
  }
  if (config.emit_json) {
    json j = metrics_json(result.metrics);
    j["slit_width_m"] = slit.slit_width;
    j["slit_separation_m"] = slit.center_separation;
    j["wavelength_m"] = scenario.layout.wavelength();
    j["aperture_to_detector_m"] = scenario.layout.aperture_to_detector(Arm::two);
    j["probe_position_m"] = scenario.probe.position;
    j["broadband_validity"] = broadband_validity(scenario.source.correlation_length, slit.slit_width);
    out.add("fringe_metrics.json", dump(j));
  }
  if (config.emit_svg)
    out.add("analytic_g2.svg", g2_overlay("Closed-form g2(x_p, x2)", result.positions, {}, result.g2,
                                          "", "closed form"));
  out.flush();
  return result;
}

SimulationOutputs cmd_simulate(const RunConfig &config, const fs::path &out_dir) {
  auto scenario = config.scenario();
  scenario.validate();
  const auto slit = config.slit();
  const unsigned workers = resolve_workers(config.workers);

  const auto t0 = std::chrono::steady_clock::now();
  auto acc = run_ensemble(scenario, workers);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  SimulationOutputs r{scenario, std::move(acc), {}, {}, {}, std::nullopt, elapsed};
  const double probe = scenario.probe.position;
  for (Arm a : {Arm::one, Arm::two}) {
    const auto i = arm_index(a);
    r.slices[i] = g2_slice(r.accumulator, a);
    r.singles[i] = singles_profile(r.accumulator, a);
    r.model[i] = model_slice(scenario, slit, a, r.slices[i].positions, probe);
  }
  if (scenario.field_diagnostics)
    r.siegert = siegert_check(r.accumulator);

  OutputSet out(out_dir);
  if (config.emit_csv) {
    for (Arm a : {Arm::one, Arm::two}) {
      const auto i = arm_index(a);
      const auto n = std::to_string(arm_number(a));
      out.add("g2_scan_arm" + n + ".csv",
              table_text([&](std::ostream &o) { write_g2_csv(o, r.slices[i], r.model[i]); }));
      out.add("singles_arm" + n + ".csv",
              table_text([&](std::ostream &o) { write_singles_csv(o, r.singles[i]); }));
    }
    if (r.siegert) {
      const auto &s = *r.siegert;
      std::vector<double> combined(s.positions.size());
      for (std::size_t i = 0; i < combined.size(); ++i)
        combined[i] = s.combined_stderr(i);
      out.add("siegert.csv", table_text([&](std::ostream &o) {
                write_table(o, "x_m,g2_minus_1,g2_stderr,coherence_sq,coherence_stderr",
                            {s.positions, s.g2_minus_one, s.g2_stderr, s.coherence_sq,
                             s.coherence_stderr});
              }));
    }
    if (scenario.matrix_stride > 0) {
      const auto m = g2_matrix(r.accumulator);
      std::vector<double> c1, c2, c3;
      for (std::size_t a = 0; a < m.x1.size(); ++a)
        for (std::size_t b = 0; b < m.x2.size(); ++b) {
          c1.push_back(m.x1[a]);
          c2.push_back(m.x2[b]);
          c3.push_back(m.g2[a * m.x2.size() + b]);
        }
      out.add("g2_matrix.csv",
              table_text([&](std::ostream &o) { write_table(o, "x1_m,x2_m,g2", {c1, c2, c3}); }));
    }
  }
  if (config.emit_json) {
    const auto detector = scenario.detector();
    json j;
    j["master_seed"] = scenario.master_seed;
    j["frames"] = scenario.frames;
    j["workers"] = workers;
    j["grid"] = {{"window_m", scenario.grid.window()},
                 {"samples", scenario.grid.samples()},
                 {"spacing_m", scenario.grid.spacing()}};
    j["detector"] = {{"half_width_m", scenario.detector_half_width},
                     {"pixels", detector.count},
                     {"probe_position_m", probe}};
    j["timing"] = {{"elapsed_s", elapsed},
                   {"frames_per_s", elapsed > 0 ? double(scenario.frames) / elapsed : 0.0}};
    j["broadband_validity"] = broadband_validity(scenario.source.correlation_length, slit.slit_width);
    if (scenario.layout.is_symmetric())
      j["fringe_metrics"] = metrics_json(fringe_metrics(scenario.layout, slit, scenario.apertures));
    if (r.siegert) {
      const double e = scenario.layout.wavelength() * scenario.layout.aperture_to_detector(Arm::two) /
                       slit.slit_width;
      j["siegert_agreement_5sigma"] = finite_or_null(r.siegert->agreement_fraction(5.0, probe, e));
    }
    j["config"] = config.to_json();
    out.add("run_report.json", dump(j));
  }
  if (config.emit_svg) {
    for (Arm a : {Arm::one, Arm::two}) {
      const auto i = arm_index(a);
      const auto n = std::to_string(arm_number(a));
      const std::string title = a == Arm::two ? "g2(x_p, x2), scanning arm 2"
                                              : "g2(x1, x_p), scanning arm 1";
      out.add("g2_scan_arm" + n + ".svg",
              g2_overlay(title, r.slices[i].positions, r.slices[i].g2, r.model[i], "simulation",
                         "closed form"));
      PlotSpec plot;
      plot.title = "Mean intensity, arm " + n;
      plot.x_label = "x (mm)";
      plot.y_label = "<I>";
      plot.x_scale = 1e3;
      plot.series.push_back({"simulation", r.singles[i].positions, r.singles[i].mean,
                             PlotSeries::Style::markers, "#2e7d32"});
      out.add("singles_arm" + n + ".svg", render_svg(plot));
    }
  }
  out.flush();
  return r;
}

FitOutputs cmd_fit(const fs::path &csv, const RunConfig &config, Arm scan_arm,
                   const fs::path &out_dir) {
  const auto layout = config.layout();
  std::ifstream in(csv);
  if (!in)
    throw DataError("cannot open " + csv.string());
  const auto slice = read_g2_csv(in, csv.string());

  FitOutputs r;
  r.seed = seed_fit(slice);
  r.result = fit(slice, r.seed.params);
  r.distance = layout.aperture_to_detector(scan_arm);
  const double lambda = layout.wavelength();
  r.slit_separation = r.result.slit_separation(lambda, r.distance);
  r.slit_width = r.result.slit_width(lambda, r.distance);

  OutputSet out(out_dir);
  if (config.emit_json) {
    const auto &p = r.result.params;
    json params = {{"baseline", p.baseline},
                   {"visibility", p.visibility},
                   {"period_m", p.period},
                   {"envelope_zero_m", p.envelope_zero},
                   {"center_m", p.center}};
    json errors;
    for (std::size_t k = 0; k < 5; ++k)
      errors[fringe_parameter_names[k]] = r.result.stderr_of(k);
    json cov = json::array();
    for (int a = 0; a < 5; ++a) {
      json row = json::array();
      for (int b = 0; b < 5; ++b)
        row.push_back(r.result.covariance(a, b));
      cov.push_back(row);
    }
    json j;
    j["input"] = csv.string();
    j["converged"] = r.result.converged;
    j["iterations"] = r.result.iterations;
    j["points"] = r.result.points;
    j["params"] = params;
    j["stderr"] = errors;
    j["covariance"] = cov;
    j["residual_rms"] = r.result.residual_rms;
    j["chi2"] = r.result.chi2;
    j["correlation_time"] = r.result.correlation_time;
    j["wavelength_m"] = lambda;
    j["aperture_to_detector_m"] = r.distance;
    j["scan_arm"] = arm_number(scan_arm);
    j["slit_separation_m"] = r.slit_separation;
    j["slit_separation_stderr_m"] = r.slit_separation * r.result.stderr_of(2) / p.period;
    j["slit_width_m"] = r.slit_width;
    j["slit_width_stderr_m"] = r.slit_width * r.result.stderr_of(3) / p.envelope_zero;
    j["seed"] = {{"baseline", r.seed.params.baseline},
                 {"visibility", r.seed.params.visibility},
                 {"period_m", r.seed.params.period},
                 {"envelope_zero_m", r.seed.params.envelope_zero},
                 {"center_m", r.seed.params.center},
                 {"low_confidence", r.seed.low_confidence},
                 {"peak_to_floor", finite_or_null(r.seed.peak_to_floor)}};
    out.add("fit_report.json", dump(j));
  }
  if (config.emit_svg) {
    std::vector<double> model(slice.size());
    for (std::size_t i = 0; i < model.size(); ++i)
      model[i] = r.result.params(slice.positions[i]);
    out.add("fit.svg", g2_overlay("Fringe fit", slice.positions, slice.g2, model, "data", "fit"));
  }
  out.flush();
  return r;
}

} // namespace ghostfringe
