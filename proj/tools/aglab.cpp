#include <CLI11.hpp>
#include <iostream>

#include "aglab/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Aviles-Giga limit experiments"};
  app.require_subcommand(1);
  std::string config;
  for (const std::string& name : aglab::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("config", config, "experiment config (.cfg)")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return aglab::run(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}
