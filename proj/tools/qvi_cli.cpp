#include <CLI11.hpp>

#include "qvi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"QVI toolkit: uniqueness checks, solvers, sensitivity, control"};
  app.require_subcommand(1);

  qvi::cli::CliOptions opts;
  for (const char* name : {"check-conditions", "solve", "derivative", "counterexample",
                           "obstacle-study", "control", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "config file (JSON)");
    sub->add_option("--out", opts.out_dir, "output directory for report.json and tables");
    sub->add_option("--seed", opts.seed, "seed for random sampling");
    sub->add_option("--tol", opts.tol, "solver tolerance override");
    sub->add_option("--max-iter", opts.max_iter, "iteration cap override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : qvi::cli::kConfigError;
  }
  opts.command = app.get_subcommands().front()->get_name();
  return qvi::cli::runCommand(opts);
}
