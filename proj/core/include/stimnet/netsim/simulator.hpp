#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stimnet/netsim/connection.hpp"
#include "stimnet/netsim/misbehavior.hpp"
#include "stimnet/netsim/topology.hpp"
#include "stimnet/netsim/trace.hpp"

namespace stimnet::netsim {

struct SimulationParams {
  double bandwidth_bps = 2e6;
  int rts_retry_limit = 7;
  int ack_failure_limit = 3;        // consecutive handshake failures before RERR
  std::size_t queue_capacity = 64;  // per-node MAC queue and discovery buffer
  double discovery_timeout = 2.0;   // seconds per RREQ attempt
  int rreq_retries = 2;
  double rreq_jitter = 0.01;        // seconds, max rebroadcast jitter
  double tunnel_latency = 0.001;    // seconds over a wormhole link
  double route_lifetime = 10.0;     // seconds; refreshed whenever data uses the route
};

struct ConnectionStats {
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped_misbehavior = 0;
  std::int64_t dropped_queue = 0;
  std::int64_t dropped_route = 0;
  std::int64_t dropped_mac = 0;

  std::int64_t dropped() const {
    return dropped_misbehavior + dropped_queue + dropped_route + dropped_mac;
  }
};

struct SimulationResult {
  EventTrace trace;
  std::vector<Connection> connections;  // with discovered paths filled in
  std::vector<ConnectionStats> stats;   // indexed like `connections`
  std::vector<ConnectionId> skipped;    // unroutable connections
  std::vector<std::string> log;
};

/// Runs the event loop until all injected packets are delivered or dropped.
/// Injection stops at `sim_duration`; trace events after it are kept so that
/// every connection's packet accounting closes.
SimulationResult run_simulation(const Topology& topology, const std::vector<Connection>& connections,
                                const MisbehaviorPlan& plan, double sim_duration, std::uint64_t seed,
                                const SimulationParams& params = {});

}  // namespace stimnet::netsim
