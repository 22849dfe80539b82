#include "stimnet/netsim/connection.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace stimnet::netsim {

double connection_duration(double delta, double lambda, double r_u) {
  if (!(r_u >= 0.0 && r_u <= 1.0)) throw ConfigError("r_u must lie in [0, 1]");
  if (delta < 0.0 || lambda < 0.0) throw ConfigError("delta and lambda must be non-negative");
  return delta + r_u * lambda;
}

std::vector<Connection> plan_connections(const Topology& topology, const TrafficSpec& spec,
                                         double sim_duration, std::uint64_t seed) {
  if (!(spec.injection_interval > 0.0)) throw ConfigError("injection_interval must be positive");
  if (spec.packet_size <= 0) throw ConfigError("packet_size must be positive");

  std::vector<Connection> out;
  if (!spec.explicit_connections.empty()) {
    for (const auto& ec : spec.explicit_connections) {
      if (!topology.contains(ec.source) || !topology.contains(ec.destination))
        throw ConfigError("connection references an unknown node");
      if (ec.source == ec.destination) throw ConfigError("connection source equals destination");
      Connection c;
      c.id = static_cast<ConnectionId>(out.size());
      c.source = ec.source;
      c.destination = ec.destination;
      c.start_time = ec.start_time;
      c.duration = ec.duration;
      c.injection_interval = spec.injection_interval;
      c.packet_size = spec.packet_size;
      out.push_back(std::move(c));
    }
    return out;
  }

  if (spec.concurrent <= 0) return out;
  if (spec.hops < 1) throw ConfigError("connection hops must be at least 1");

  // Candidate destinations per source at exactly `hops` hops.
  std::vector<std::vector<NodeId>> targets(topology.size());
  std::vector<NodeId> sources;
  for (std::size_t s = 0; s < topology.size(); ++s) {
    const auto dist = topology.hop_distances(static_cast<NodeId>(s));
    for (std::size_t d = 0; d < dist.size(); ++d)
      if (dist[d] == spec.hops) targets[s].push_back(static_cast<NodeId>(d));
    if (!targets[s].empty()) sources.push_back(static_cast<NodeId>(s));
  }
  if (sources.empty())
    throw ConfigError("no node pair is exactly " + std::to_string(spec.hops) + " hops apart");

  std::mt19937_64 rng(mix_seed(seed, 0xC0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<NodeId> unused = sources;
  std::shuffle(unused.begin(), unused.end(), rng);

  auto next_source = [&]() {
    if (unused.empty()) {
      unused = sources;
      std::shuffle(unused.begin(), unused.end(), rng);
    }
    const NodeId s = unused.back();
    unused.pop_back();
    return s;
  };

  for (int slot = 0; slot < spec.concurrent; ++slot) {
    double t = unit(rng) * spec.injection_interval;
    while (t < sim_duration) {
      Connection c;
      c.source = next_source();
      const auto& cand = targets[static_cast<std::size_t>(c.source)];
      std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
      c.destination = cand[pick(rng)];
      c.start_time = t;
      c.duration = connection_duration(spec.delta, spec.lambda, unit(rng));
      c.injection_interval = spec.injection_interval;
      c.packet_size = spec.packet_size;
      if (!(c.duration > 0.0)) break;
      t += c.duration;
      out.push_back(std::move(c));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Connection& a, const Connection& b) {
    return a.start_time < b.start_time;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<ConnectionId>(i);
  return out;
}

}  // namespace stimnet::netsim
