#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mhddg/driver.hpp"

namespace {

std::string read_file(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw mhddg::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"entropy-stable GLM-MHD DGSEM solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir = ".";
  int threads = 1;
  std::uint64_t seed = 12345;
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--threads", threads, "worker threads for residual evaluation");
  app.add_option("--output", output_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized fields");

  auto *run = app.add_subcommand("run", "time-integrate the configured case");
  auto *conv = app.add_subcommand("convergence", "mesh-refinement error study");
  auto *convt = app.add_subcommand("convergence-in-time",
                                   "CFL sweep of the temporal entropy defect");
  auto *audit = app.add_subcommand("audit", "entropy-balance audit of one residual");
  auto *cmp = app.add_subcommand("compare-schemes", "pairwise residual equivalences");

  CLI11_PARSE(app, argc, argv);

  try {
    mhddg::RunConfig cfg = mhddg::parse_config(read_file(config_path));
    cfg.output_dir = output_dir;
    cfg.threads = threads;
    cfg.seed = seed;
    if (run->parsed()) return mhddg::cmd_run(cfg);
    if (conv->parsed()) return mhddg::cmd_convergence(cfg);
    if (convt->parsed()) return mhddg::cmd_convergence_in_time(cfg);
    if (audit->parsed()) return mhddg::cmd_audit(cfg);
    if (cmp->parsed()) return mhddg::cmd_compare_schemes(cfg);
  } catch (const std::exception &ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
