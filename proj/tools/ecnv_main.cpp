#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ecnv/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic electroconvection simulator"};
  app.require_subcommand(1);
  ecnv::CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out_dir;

  for (const char* name : {"run", "ensemble", "diagnose", "measure", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config", opts.config_path, "configuration file");
    if (std::string(name) != "selftest") cfg->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override rng.seed");
    sub->add_option("--out", out_dir, "override output.dir");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: category=config message=" << e.what() << '\n';
    return 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--out")) opts.out_dir = out_dir;
  return ecnv::execute(*ecnv::parse_command(sub->get_name()), opts, std::cout, std::cerr);
}
