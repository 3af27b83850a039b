// nlslab command-line driver: one subcommand per experiment preset.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>

#include "nlslab/config.hpp"
#include "nlslab/error.hpp"
#include "nlslab/experiments.hpp"

int main(int argc, char** argv) {
  using namespace nlslab;
  CLI::App app{"Numerical laboratory for the mass-critical focusing NLS"};
  app.require_subcommand(1);

  std::map<std::string, std::string> config_path;
  std::map<std::string, std::map<std::string, std::string>> overrides;
  for (const auto& name : experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " preset");
    sub->add_option("--config", config_path[name], "config file (key = value)")->check(CLI::ExistingFile);
    for (const auto& key : config_keys()) {
      if (key == "experiment") continue;
      sub->add_option("--" + key, overrides[name][key], "override '" + key + "'");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommand(name);
  try {
    RunConfig cfg = config_path[name].empty() ? RunConfig{} : load_config(config_path[name]);
    cfg.experiment = name;
    if (const char* env = std::getenv("NLSLAB_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    for (const auto& [key, value] : overrides[name])
      if (sub->count("--" + key) > 0) set_config_value(cfg, key, value);
    validate(cfg);
    const auto result = run_experiment(cfg);
    for (const auto& c : result.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " " << c.relation << " " << c.limit
                << "\n";
    for (const auto& f : result.failures)
      if (f.rfind("error:", 0) == 0 || f.rfind("exception:", 0) == 0) std::cerr << f << "\n";
    std::cout << "summary: " << cfg.output_dir << "/summary.json (" << (result.status == 0 ? "pass" : "fail")
              << ")\n";
    return result.status;
  } catch (const ParseError& e) {
    std::cerr << "config error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid value for '" << e.field() << "': " << e.what() << "\n";
    return 2;
  }
}
