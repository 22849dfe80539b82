#include <exception>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "stimnet/common.hpp"
#include "stimnet/experiment/commands.hpp"

namespace ex = stimnet::experiment;

int main(int argc, char** argv) {
  CLI::App app{"Ad hoc network simulator and misbehavior-detection pipeline"};
  app.require_subcommand(1);
  ex::CommandOptions opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Scenario JSON (default: built-in desk scenario)");
    sub->add_option("--out", opt.out, "Work directory shared by all stages")->capture_default_str();
    return sub;
  };
  auto windowed = [&](CLI::App* sub) {
    sub->add_option("--window", opt.window, "Only this window size in seconds");
    return sub;
  };

  auto* simulate = common(app.add_subcommand("simulate", "Run one simulation per misbehavior kind and seed"));
  simulate->add_option("--seeds", opt.seeds, "Seed list, e.g. 1-20 or 1,4,7");
  auto* extract = windowed(common(app.add_subcommand("extract", "Turn traces into per-monitor datasets")));
  extract->add_option("--seeds", opt.seeds, "Subset of the simulated seeds");
  auto* train = windowed(common(app.add_subcommand("train", "Feature selection and cross-validation per monitor")));
  train->add_option("--mode", opt.mode, "Dataset: f0, F0, F1 or F2")
      ->check(CLI::IsMember({"f0", "F0", "F1", "F2"}))
      ->capture_default_str();
  windowed(common(app.add_subcommand("cascade", "Evaluate the two-stage K(F2)->K(f0) cascade")));
  auto* energy = common(app.add_subcommand("energy", "Energy trade-off table and plot data"));
  energy->add_option("--fp-source", opt.fp_source, "paper or measured")
      ->check(CLI::IsMember({"paper", "measured"}))
      ->capture_default_str();
  common(app.add_subcommand("report", "Collect all reports into one summary"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const auto name = app.get_subcommands().front()->get_name();
    if (name == "simulate") ex::cmd_simulate(opt, std::cerr);
    else if (name == "extract") ex::cmd_extract(opt, std::cerr);
    else if (name == "train") ex::cmd_train(opt, std::cerr);
    else if (name == "cascade") ex::cmd_cascade(opt, std::cerr);
    else if (name == "energy") ex::cmd_energy(opt, std::cout);
    else ex::cmd_report(opt, std::cout);
  } catch (const stimnet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
