#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "stimnet/learn/decision_tree.hpp"
#include "stimnet/netsim/connection.hpp"
#include "stimnet/netsim/misbehavior.hpp"
#include "stimnet/netsim/simulator.hpp"
#include "stimnet/netsim/topology.hpp"

namespace stimnet::experiment {

struct MisbehaviorConfig {
  std::vector<netsim::MisbehaviorKind> kinds = {
      netsim::MisbehaviorKind::none, netsim::MisbehaviorKind::dropping,
      netsim::MisbehaviorKind::delaying, netsim::MisbehaviorKind::wormhole};
  int node_count = 27;
  std::vector<NodeId> nodes;  // fixed dropping/delaying set, overrides node_count
  double probability = 0.30;
  double delay = 0.1;
  int wormhole_count = 3;
  int wormhole_separation = 8;
  std::vector<netsim::Wormhole> wormholes;  // fixed pairs, override the count
};

struct Scenario {
  netsim::TopologyParams topology;
  std::vector<netsim::NodePosition> positions;  // explicit layout, else random
  netsim::TrafficSpec traffic;
  MisbehaviorConfig misbehavior;
  netsim::SimulationParams simulation;
  double sim_duration = 3600.0;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  std::vector<double> window_sizes = {50.0, 100.0, 250.0, 500.0};
  std::size_t monitor_count = 20;
  int n_folds = 20;
  std::vector<std::uint64_t> seeds;  // defaults to 1..20
  std::size_t min_class_samples = 10;
  learn::TreeParams tree;
};

struct Config {
  Scenario scenario;
  ExperimentConfig experiment;
  std::uint64_t hash = 0;  // of the source text

  std::string hash_hex() const;
};

/// Throws ConfigError naming the offending key.
Config parse_config(std::string_view json_text);
Config load_config(const std::string& path);
/// Built-in desk-scale setup (200 nodes, 10 connections of 7 hops, 1 h).
Config default_config();

/// "1,2,5-8" style list.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<double> parse_window_list(std::string_view text);

std::shared_ptr<const netsim::Topology> make_topology(const Scenario& s);
netsim::MisbehaviorPlan make_plan(const Scenario& s, const netsim::Topology& topology,
                                  netsim::MisbehaviorKind kind, std::uint64_t run_seed);
std::vector<netsim::Connection> make_connections(const Scenario& s, const netsim::Topology& topology,
                                                 std::uint64_t run_seed);

}  // namespace stimnet::experiment
