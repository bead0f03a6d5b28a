// Command-line driver: time-domain runs, convergence studies, operator
// spectra, the projection benchmark, and the scenario catalog, all fed by a
// JSON configuration file. Exit codes: 0 success, 1 runtime failure,
// 2 configuration error.

#include "wadg/driver.hpp"
#include "wadg/errors.hpp"
#include "wadg/kernels.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <ostream>

namespace {

struct NullBuffer : std::streambuf {
  int overflow(int c) override { return c; }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"wadg2d: weight-adjusted DG solver for 2D elastic waves"};
  app.require_subcommand(1);

  std::string config_path, out_dir, kernels_name = "auto";
  int threads = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--threads", threads, "Worker threads (overrides config)");
  app.add_option("--kernels", kernels_name,
                 "Kernel backend: auto, scalar, avx2, neon");
  app.add_flag("--quiet", quiet, "Suppress progress output");
  app.fallthrough();

  auto* sub_run = app.add_subcommand("run", "Advance one scenario in time");
  auto* sub_conv =
      app.add_subcommand("converge", "Error sweep over degrees and meshes");
  auto* sub_spec =
      app.add_subcommand("spectrum", "Dense operator eigenvalues");
  auto* sub_bench = app.add_subcommand(
      "bench", "Stored-matrix vs matrix-free mass inverse timings");
  auto* sub_list = app.add_subcommand("scenarios", "List known scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  NullBuffer null_buffer;
  std::ostream null_stream(&null_buffer);
  std::ostream& log = quiet ? null_stream : std::cout;

  try {
    wadg::kernels::select(wadg::kernels::backend_from_name(kernels_name));

    if (sub_list->parsed()) {
      wadg::cmd_scenarios(std::cout);
      return 0;
    }

    wadg::RunConfig cfg;
    if (!config_path.empty()) cfg = wadg::load_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;

    if (sub_run->parsed()) wadg::cmd_run(cfg, log);
    else if (sub_conv->parsed()) wadg::cmd_converge(cfg, log);
    else if (sub_spec->parsed()) wadg::cmd_spectrum(cfg, log);
    else if (sub_bench->parsed()) wadg::cmd_bench(cfg, log);
    return 0;
  } catch (const wadg::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
