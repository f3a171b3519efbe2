#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hplab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg-Pauli quantization laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  hplab::RunOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "INI configuration file (defaults built in)");
    sub->add_option("-o,--output", opts.output_dir, "output directory (overrides config and HPLAB_OUTPUT_DIR)");
  };

  std::string chosen;
  for (const auto& name : hplab::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub);
    if (name == "ccr-check") sub->add_flag("--describe", opts.describe, "print the Fock basis summary");
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI::App* validate = app.add_subcommand("validate", "check a config without running numerics");
  validate->add_option("config", config_path, "INI configuration file")->required();
  validate->callback([&chosen] { chosen = "validate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hplab::kExitConfig;
  }

  if (chosen == "validate") return hplab::validate_command(config_path, std::cout, std::cerr);
  return hplab::run_command(chosen, config_path, opts, std::cout, std::cerr);
}
