#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace stimnet::experiment {

struct CommandOptions {
  std::string config_path;        // empty selects the built-in desk scenario
  std::string out = "stimnet-out";  // work directory shared by all stages
  std::optional<double> window;   // restrict to one window size
  std::string mode = "f0";        // train: f0, F0, F1 or F2
  std::string seeds;              // e.g. "1-5,9"; empty keeps the configured list
  std::string fp_source = "paper";  // energy: paper or measured
};

// Each stage reads and writes plain files under `out`. Errors are thrown as
// ConfigError / DataError / InvariantError.
void cmd_simulate(const CommandOptions& opt, std::ostream& log);
void cmd_extract(const CommandOptions& opt, std::ostream& log);
void cmd_train(const CommandOptions& opt, std::ostream& log);
void cmd_cascade(const CommandOptions& opt, std::ostream& log);
void cmd_energy(const CommandOptions& opt, std::ostream& log);
void cmd_report(const CommandOptions& opt, std::ostream& log);

}  // namespace stimnet::experiment
