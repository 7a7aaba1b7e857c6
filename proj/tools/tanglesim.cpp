#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tangle/config.hpp"
#include "tangle/runner.hpp"

namespace {

struct Flags {
  std::string config_path;
  double lambda = 0.0;
  double h = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
};

void add_common_options(CLI::App* cmd, Flags& flags) {
  // --h is taken by the proof-of-work duration, so help is --help only.
  cmd->set_help_flag("--help", "print this help message and exit");
  cmd->add_option("-c,--config", flags.config_path,
                  "key = value run configuration file");
  cmd->add_option("--lambda", flags.lambda, "arrival rate override");
  cmd->add_option("--h", flags.h, "proof-of-work duration override");
  cmd->add_option("--T", flags.horizon, "horizon override");
  cmd->add_option("--dt", flags.dt, "solver step override (must divide h)");
  cmd->add_option("--replicas", flags.replicas, "sweep replica count override");
  cmd->add_option("--seed", flags.seed, "base seed override");
  cmd->add_option("--out", flags.out, "output directory override");
  cmd->add_flag("--force", flags.force,
                "allow writing into an existing output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tangle tip-process simulator and fluid-limit toolkit"};
  app.set_help_flag("--help", "print this help message and exit");
  app.set_version_flag("--version", std::string("tanglesim ") + tangle::kVersion);
  app.require_subcommand(1);

  Flags flags;
  for (const char* name : {"simulate", "fluid", "sweep", "decay"}) {
    add_common_options(app.add_subcommand(name), flags);
  }
  CLI11_PARSE(app, argc, argv);
  CLI::App* cmd = app.get_subcommands().front();
  const auto mode = tangle::mode_from_name(cmd->get_name());

  std::string text;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config file `" << flags.config_path
                << "`\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  std::vector<std::string> errors;
  tangle::RunConfig cfg = tangle::parse_config_raw(text, errors);
  cfg.mode = *mode;
  if (cmd->count("--lambda") > 0) cfg.lambda = flags.lambda;
  if (cmd->count("--h") > 0) cfg.h = flags.h;
  if (cmd->count("--T") > 0) cfg.horizon = flags.horizon;
  if (cmd->count("--dt") > 0) cfg.dt = flags.dt;
  if (cmd->count("--replicas") > 0) cfg.replicas = flags.replicas;
  if (cmd->count("--seed") > 0) cfg.base_seed = flags.seed;
  if (cmd->count("--out") > 0) cfg.out = flags.out;
  cfg.force = flags.force;
  if (const char* env = std::getenv("TANGLESIM_WORKERS")) {
    const int workers = std::atoi(env);
    if (workers >= 1) cfg.workers = workers;
  }

  std::vector<std::string> warnings;
  const auto more = tangle::finalize_config(cfg, &warnings);
  errors.insert(errors.end(), more.begin(), more.end());
  for (const std::string& warning : warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  if (!errors.empty()) {
    for (const std::string& error : errors) {
      std::cerr << "config error: " << error << "\n";
    }
    return 2;
  }
  return tangle::run(cfg);
}
