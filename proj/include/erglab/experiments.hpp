#pragma once

// Experiment configuration and the command runner behind the erglab tool.
// Settings arrive as flat key/value pairs (from a JSON file, flags, or both);
// parse_config validates them into an ExperimentConfig and run() executes it.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "erglab/dynamics.hpp"

namespace erglab {

/// Malformed or inconsistent configuration; the tool exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitGateFail = 1;
inline constexpr int kExitUsage = 2;

struct ExperimentConfig {
  std::string command;

  // Model
  std::string model = "renewal";  // renewal | thaler | lasota_yorke | doubling
  std::string tail = "power:0.5";
  std::string delay = "renewal";  // renewal | tail:CAP
  Interval A{0.5, 1.0};
  std::string init = "uniform_on_a";

  // simulate / limitcheck
  std::uint64_t n = 1000;
  std::uint64_t samples = 10'000;
  std::string stat = "zn_over_n";  // zn_over_n | phi | psi | log_zn | log_age
  std::string law = "xi:0.5";
  std::vector<std::uint64_t> n_list{100, 1000, 10000};
  double threshold = 0.05;
  std::string source = "mc";  // mc | exact

  // Tail tables
  std::uint64_t k = 10'000;
  std::uint64_t tail_samples = 1'000'000;
  double max_censoring = 0.01;
  std::optional<double> a_mass;

  // ulam
  std::uint64_t m = 4096;
  std::string partition = "geometric";  // geometric | uniform
  std::string mode = "exact";           // exact | mc
  std::uint64_t samples_per_cell = 1000;
  std::uint64_t ncesaro = 20'000;
  std::uint64_t burn = 20'000;
  double cut = 0.01;
  double pivot = 0.05;
  double ratio = 0.9;
  double beta = 0.0;
  std::vector<std::uint64_t> ngrid{250, 500, 1000, 2000};

  // regvar
  std::string diag = "ktt";  // ktt | kl | erickson | slow
  std::string seq = "ones";
  double rho = 1.0;
  double p = 0.0;
  std::string l = "powerlog:0,0";
  std::vector<double> s_list{0.1, 0.01, 0.001};
  double x = 0.5;
  double lambda = 2.0;

  // dist
  double alpha = 0.5;
  std::uint64_t grid = 1001;

  std::optional<std::uint64_t> seed;
  std::string out;  // empty: CSV to the given stream
  unsigned threads = 0;
};

using Settings = std::map<std::string, std::string>;

const std::vector<std::string>& commands();
/// Keys accepted by a command, excluding the global seed/out/threads/config.
const std::vector<std::string>& command_keys(const std::string& command);

/// Validates keys and values. Throws ConfigError.
ExperimentConfig parse_config(const std::string& command, const Settings& settings);

/// Flattens a JSON object into settings (arrays become comma lists). The
/// optional "command" member is returned separately. Throws ConfigError.
Settings settings_from_json(const std::string& text, std::string* command = nullptr);

/// Executes the experiment and returns the exit status. CSV goes to
/// config.out when set, otherwise to `csv`; diagnostics go to `log`.
int run(const ExperimentConfig& config, std::ostream& csv, std::ostream& log);

}  // namespace erglab
