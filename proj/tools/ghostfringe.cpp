#include "ghostfringe/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ghostfringe;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> frames;
  std::optional<unsigned> workers;
};

RunConfig configure(const Overrides &o, const std::set<std::string> &required) {
  auto config = load_config(o.config, required);
  if (o.seed)
    config.master_seed = *o.seed;
  if (o.frames)
    config.frames = *o.frames;
  if (o.workers)
    config.workers = *o.workers;
  if (!o.out.empty())
    config.output_dir = o.out;
  return config;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Two-arm pseudothermal double-slit correlation simulator"};
  app.require_subcommand(1);

  Overrides opt;
  int scan_arm = 2;
  std::string csv;

  auto *analytic = app.add_subcommand("analytic", "closed-form g2 slice and fringe metrics");
  auto *simulate = app.add_subcommand("simulate", "Monte Carlo ensemble of speckle frames");
  auto *fitcmd = app.add_subcommand("fit", "fit the fringe law to a g2 CSV");
  for (auto *sub : {analytic, simulate, fitcmd}) {
    sub->add_option("--config", opt.config, "key=value config file")->required();
    sub->add_option("--out", opt.out, "output directory (overrides output_dir)");
  }
  simulate->add_option("--seed", opt.seed, "master seed");
  simulate->add_option("--frames", opt.frames, "number of frames")->check(CLI::PositiveNumber);
  simulate->add_option("--workers", opt.workers, "worker threads (0: all cores)");
  fitcmd->add_option("csv", csv, "g2 CSV (x_m,g2,stderr,g2_model)")->required();
  fitcmd->add_option("--scan-arm", scan_arm, "arm scanned in the CSV")->check(CLI::IsMember({1, 2}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  return run_guarded(
      [&] {
        if (analytic->parsed()) {
          const auto config = configure(opt, physics_keys());
          const auto r = cmd_analytic(config, config.output_dir);
          std::cout << "period " << r.metrics.period << " m, envelope zero "
                    << r.metrics.envelope_first_zero << " m, V0 " << r.metrics.visibility_factor
                    << "\nwrote " << config.output_dir << '\n';
        } else if (simulate->parsed()) {
          const auto config = configure(opt, physics_keys());
          const auto r = cmd_simulate(config, config.output_dir);
          std::cout << r.scenario.frames << " frames in " << r.elapsed_seconds << " s\nwrote "
                    << config.output_dir << '\n';
        } else {
          const auto config = configure(opt, layout_keys());
          const auto r = cmd_fit(csv, config, scan_arm == 1 ? Arm::one : Arm::two,
                                 config.output_dir);
          std::cout << (r.result.converged ? "converged" : "NOT converged") << ": period "
                    << r.result.params.period << " m, envelope zero "
                    << r.result.params.envelope_zero << " m\nd = " << r.slit_separation
                    << " m, b = " << r.slit_width << " m\nwrote " << config.output_dir << '\n';
        }
      },
      std::cerr);
}
