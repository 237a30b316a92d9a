#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "penaparab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Penalized space-time solver for parabolic problems on moving intervals"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir;

  for (const char* name : {"certify", "solve", "convergence", "oracle-compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config, "configuration JSON")->required();
    sub->add_option("-o,--output", out_dir, "output directory (overrides output.dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return penaparab::cli::kExitConfig;
  }

  penaparab::cli::Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  inv.config = config;
  if (!out_dir.empty()) inv.out_dir = out_dir;
  return penaparab::cli::run(inv, std::cerr);
}
