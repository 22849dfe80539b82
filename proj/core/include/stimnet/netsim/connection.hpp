#pragma once

#include <cstdint>
#include <vector>

#include "stimnet/common.hpp"
#include "stimnet/netsim/topology.hpp"

namespace stimnet::netsim {

/// A CBR flow. `path` holds the route first established by discovery
/// (source first); it stays empty when no route was ever found.
struct Connection {
  ConnectionId id = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  std::vector<NodeId> path;
  double start_time = 0.0;           // seconds
  double duration = 0.0;             // seconds
  double injection_interval = 2.0;   // seconds
  int packet_size = 68;              // bytes
};

/// delta + r_u * lambda.
double connection_duration(double delta, double lambda, double r_u);

struct ExplicitConnection {
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  double start_time = 0.0;
  double duration = 0.0;
};

struct TrafficSpec {
  int concurrent = 10;
  int hops = 7;
  double injection_interval = 2.0;
  int packet_size = 68;
  double delta = 900.0;
  double lambda = 300.0;
  // When non-empty, replaces the generated schedule.
  std::vector<ExplicitConnection> explicit_connections;
};

/// Builds the connection schedule. Generated mode keeps `concurrent` flows
/// alive; an expired flow is replaced by one from a source not used before
/// (sources are recycled once exhausted). Destinations sit exactly `hops`
/// hops away from their source in the topology.
std::vector<Connection> plan_connections(const Topology& topology, const TrafficSpec& spec,
                                         double sim_duration, std::uint64_t seed);

}  // namespace stimnet::netsim
