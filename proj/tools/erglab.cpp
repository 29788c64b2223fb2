// erglab command-line tool: thin CLI11 front end over erglab::run.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "erglab/experiments.hpp"

namespace {

std::string flag_names(const std::string& key) {
  std::string names = "--" + key;
  if (key.find('_') != std::string::npos) {
    std::string dashed = key;
    for (char& ch : dashed)
      if (ch == '_') ch = '-';
    names += ",--" + dashed;
  }
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erglab: return-time processes, limit laws and transfer operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::map<std::string, std::string> global;
  app.add_option("--config", config_path, "JSON file with settings; flags override it");
  app.add_option("--seed", global["seed"], "master seed (64-bit unsigned)");
  app.add_option("--out", global["out"], "output CSV path (default: stdout)");
  app.add_option("--threads", global["threads"], "worker threads (default: hardware)");

  const std::map<std::string, std::string> about{
      {"simulate", "per-path records (n, z_n, phi_n, psi_n)"},
      {"tail", "return-time tail table (k, t_k, W_k)"},
      {"limitcheck", "KS convergence sweep of a statistic against a limit law"},
      {"ulam", "Ulam transfer-operator ratio checks"},
      {"regvar", "regular-variation diagnostics"},
      {"dist", "limit-law density and CDF table"},
      {"laplace", "s U(s) Q(s) for a renewal tail"},
  };
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : erglab::commands()) {
    const auto it = about.find(cmd);
    CLI::App* sub = app.add_subcommand(cmd, it == about.end() ? "" : it->second);
    subs[cmd] = sub;
    for (const auto& key : erglab::command_keys(cmd)) sub->add_option(flag_names(key), values[cmd][key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : erglab::kExitUsage;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  erglab::Settings settings;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw erglab::ConfigError("config: cannot open " + config_path);
      std::stringstream text;
      text << f.rdbuf();
      std::string file_command;
      settings = erglab::settings_from_json(text.str(), &file_command);
      if (!file_command.empty() && file_command != command)
        throw erglab::ConfigError("config: command '" + file_command + "' does not match '" + command + "'");
    }
    for (const auto& [key, value] : values[command])
      if (subs[command]->count(flag_names(key).substr(0, flag_names(key).find(','))) > 0) settings[key] = value;
    for (const auto& [key, value] : global)
      if (app.count("--" + key) > 0) settings[key] = value;
    const erglab::ExperimentConfig config = erglab::parse_config(command, settings);
    return erglab::run(config, std::cout, std::cerr);
  } catch (const erglab::ConfigError& e) {
    std::cerr << "erglab: " << e.what() << '\n';
    return erglab::kExitUsage;
  }
}
