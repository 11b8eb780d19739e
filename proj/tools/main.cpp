#include "semibloch/commands.hpp"
#include "semibloch/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace semibloch;

int main(int argc, char** argv) {
  CLI::App app{"semiclassical Bloch-electron dynamics"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out;
  int threads = 0;
  bool strict = false, quiet = false;
  app.add_option("--config", config_path, "YAML configuration file")->required();
  app.add_option("--out", out, "output root (default: config 'output', then $SEMIBLOCH_OUT, then ./semibloch-out)");
  app.add_option("--threads", threads, "worker threads (default: config)")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "convergence warnings become errors");
  app.add_flag("-q,--quiet", quiet, "no summary on stdout");
  app.fallthrough();

  const char* help[] = {"band energies on the configured k-grid",
                        "connection, curvature, moment and Zak phases of one band",
                        "plaquette Chern numbers of the low bands",
                        "semiclassical trajectories for every eps and start point",
                        "filled-band Hall current",
                        "wave-packet expectation against transported symbols",
                        "interior operator-norm Egorov gap on the torus",
                        "acceptance criteria listed in the config"};
  for (std::size_t i = 0; i < command_names().size(); ++i) app.add_subcommand(command_names()[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_config;
  }
  std::string name = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_config;
  }
  CommandOptions o;
  o.out = out;
  o.threads = threads;
  o.strict = strict;
  CommandResult r = run_command(name, cfg, o);
  if (!quiet) {
    for (const auto& l : r.lines) std::cout << l << "\n";
    for (const auto& c : r.checks)
      if (!c.pass)
        std::cout << (c.advisory ? "check warned: " : "check failed: ") << c.name << " = " << c.value << " ("
                  << c.bound << ")\n";
    std::cout << "artifacts: " << r.dir.string() << "\n";
  }
  if (!r.error.empty()) std::cerr << cfg.source << ": " << name << ": " << r.error << "\n";
  return r.exit_code;
}
