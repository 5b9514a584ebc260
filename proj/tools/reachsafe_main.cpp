#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reachsafe/config.hpp"

namespace {

struct SubArgs {
  std::string config;
  std::vector<std::string> sets;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-concept toolkit: learn HOCBF parameters from demonstrations and "
               "solve constrained reachability games"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<const char*, void (*)(const nlohmann::json&)>> commands =
      {
          {"gen-demos", {"Generate a demonstration corpus", reachsafe::run_gen_demos}},
          {"learn", {"Fit class-K parameters to a demo log", reachsafe::run_learn}},
          {"solve", {"Solve or roll out a value field", reachsafe::run_solve}},
          {"compare", {"Cross-tabulate two concepts and export plot data",
                       reachsafe::run_compare}},
          {"eval", {"Percentile statistics of a concept over a log", reachsafe::run_eval}},
      };

  std::map<std::string, SubArgs> args;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    SubArgs& a = args[name];
    sub->add_option("--config", a.config, "JSON config path")->required();
    sub->add_option("--set", a.sets, "dotted-key override key=value (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json cfg = reachsafe::load_config(args[name].config, args[name].sets);
    commands.at(name).second(cfg);
  } catch (const reachsafe::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const reachsafe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
