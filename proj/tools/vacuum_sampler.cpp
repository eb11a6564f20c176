#include <cstdio>
#include <exception>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <vacsim/scan.hpp>

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vacuum quadrature statistics of subcycle modes and electro-optic sampling", "vacuum-sampler"};
  app.set_version_flag("--version", VACSIM_VERSION);

  std::string scenario, config_path, out_dir, order = "all";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("scenario", scenario, "subcycle | eo_scan | waveform | order_compare | dispersion_dump")->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--jobs", jobs, "Worker threads (default: logical cores)")->check(CLI::PositiveNumber);
  app.add_option("--order", order, "1 | 2 | pert | all")->check(CLI::IsMember({"1", "2", "pert", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  vacsim::RunConfig config;
  vacsim::Scenario which{};
  vacsim::RunOptions options;
  try {
    which = vacsim::scenario_from_string(scenario);
    config = vacsim::load_config(config_path);
    if (config.scenario && *config.scenario != which)
      throw vacsim::ConfigError("config scenario '" + vacsim::to_string(*config.scenario) +
                                "' does not match the command line '" + scenario + "'");
    options.jobs = jobs;
    options.order = vacsim::order_from_string(order);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vacuum-sampler: config error: %s\n", e.what());
    return exit_config;
  }

  try {
    const vacsim::ScanResult r = vacsim::run_scenario(which, config, options);
    vacsim::write_result(r, config, out_dir);
    std::fprintf(stderr, "vacuum-sampler: wrote %zu rows to %s/%s.csv\n", r.rows.size(), out_dir.c_str(),
                 r.scenario.c_str());
  } catch (const vacsim::ConfigError& e) {
    std::fprintf(stderr, "vacuum-sampler: config error: %s\n", e.what());
    return exit_config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vacuum-sampler: numerical failure: %s\n", e.what());
    return exit_numerical;
  }
  return 0;
}
