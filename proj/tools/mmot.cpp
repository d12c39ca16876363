#include <iostream>

#include <CLI11.hpp>

#include "mmot/cli.hpp"

int main(int argc, char** argv) {
  using mmot::cli::RunConfig;
  RunConfig cfg;

  CLI::App app{"Relaxed multi-marginal transport with repulsive costs"};
  app.set_config("--config", "", "TOML/INI file with option values; flags on the command line win");
  app.require_subcommand(1);
  app.add_option("--measure", cfg.measure_path, "measure JSON");
  app.add_option("--potential", cfg.potential_path, "potential JSON (grid or support)");
  app.add_option("--N", cfg.N, "number of marginals");
  app.add_option("--kernel", cfg.kernel, "coulomb or power:<s>");
  app.add_option("--grid", cfg.grid, "\"lo1,hi1,...;res\"");
  app.add_option("--z-grid", cfg.z_grid, "\"start:stop:steps\"");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--format", cfg.format, "json or csv");
  app.add_option("--lp-tol", cfg.lp_tol);
  app.add_option("--gap-tol", cfg.gap_tol);
  app.add_option("--iter-tol", cfg.iter_tol);
  app.add_option("--max-iters", cfg.max_iters);
  app.add_option("--workers", cfg.workers, "threads, 0 = all cores");
  app.add_option("--trace", cfg.trace_path, "trace CSV for the potential command");
  app.add_option("--lp-dump", cfg.lp_dump, "write the primal LP as text");
  app.add_flag("-v,--verbose", cfg.verbosity);

  for (const char* name : {"cost", "stratify", "potential", "quantize"}) {
    app.add_subcommand(name)->fallthrough()->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("cost")->description("primal and dual relaxed cost");
  app.get_subcommand("stratify")->description("k-point layers of an optimal plan");
  app.get_subcommand("potential")->description("Lipschitz dual potential on a grid");
  app.get_subcommand("quantize")->description("quantization index and charge sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mmot::cli::kInputError;
  }
  return mmot::cli::run(cfg, std::cout, std::cerr);
}
