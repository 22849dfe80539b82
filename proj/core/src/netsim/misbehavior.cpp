#include "stimnet/netsim/misbehavior.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace stimnet::netsim {

std::string_view to_string(MisbehaviorKind kind) {
  switch (kind) {
    case MisbehaviorKind::none: return "normal";
    case MisbehaviorKind::dropping: return "dropping";
    case MisbehaviorKind::delaying: return "delaying";
    case MisbehaviorKind::wormhole: return "wormhole";
  }
  return "normal";
}

MisbehaviorKind parse_misbehavior_kind(std::string_view text) {
  if (text == "none" || text == "normal") return MisbehaviorKind::none;
  if (text == "dropping") return MisbehaviorKind::dropping;
  if (text == "delaying") return MisbehaviorKind::delaying;
  if (text == "wormhole") return MisbehaviorKind::wormhole;
  throw ConfigError("unknown misbehavior kind '" + std::string(text) + "'");
}

bool MisbehaviorPlan::affects(NodeId node) const {
  return std::binary_search(affected_nodes.begin(), affected_nodes.end(), node);
}

bool MisbehaviorPlan::is_wormhole_endpoint(NodeId node) const {
  return wormhole_partner(node).has_value();
}

std::optional<NodeId> MisbehaviorPlan::wormhole_partner(NodeId node) const {
  for (const auto& w : wormholes) {
    if (w.entry == node) return w.exit;
    if (w.exit == node) return w.entry;
  }
  return std::nullopt;
}

void MisbehaviorPlan::validate(const Topology& topology) const {
  if (!(probability >= 0.0 && probability <= 1.0))
    throw ConfigError("misbehavior probability must lie in [0, 1]");
  if (delay < 0.0) throw ConfigError("misbehavior delay must be non-negative");
  for (NodeId n : affected_nodes)
    if (!topology.contains(n)) throw ConfigError("misbehaving node is not in the topology");
  for (const auto& w : wormholes) {
    if (!topology.contains(w.entry) || !topology.contains(w.exit))
      throw ConfigError("wormhole endpoint is not in the topology");
    const int d = topology.hop_distances(w.entry)[static_cast<std::size_t>(w.exit)];
    if (d < 0 || d < w.min_hop_separation)
      throw ConfigError("wormhole endpoints are closer than the required separation");
  }
}

InfeasibleWormholeError::InfeasibleWormholeError(int requested, int max_separation)
    : ConfigError("cannot place wormholes with hop separation " + std::to_string(requested) +
                  "; maximum achievable separation is " + std::to_string(max_separation)),
      max_separation_(max_separation) {}

MisbehaviorPlan plan_misbehavior(const Topology& topology, const MisbehaviorSpec& spec,
                                 std::uint64_t seed) {
  MisbehaviorPlan plan;
  plan.kind = spec.kind;
  plan.probability = spec.probability;
  plan.delay = spec.delay;
  std::mt19937_64 rng(mix_seed(seed, 0xB0 + static_cast<std::uint64_t>(spec.kind)));

  switch (spec.kind) {
    case MisbehaviorKind::none:
      break;
    case MisbehaviorKind::dropping:
    case MisbehaviorKind::delaying: {
      if (spec.node_count < 0 || static_cast<std::size_t>(spec.node_count) > topology.size())
        throw ConfigError("misbehaving node count exceeds the node count");
      std::vector<NodeId> all(topology.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(static_cast<std::size_t>(spec.node_count));
      std::sort(all.begin(), all.end());
      plan.affected_nodes = std::move(all);
      break;
    }
    case MisbehaviorKind::wormhole: {
      std::vector<std::pair<NodeId, NodeId>> candidates;
      int max_sep = 0;
      for (std::size_t a = 0; a < topology.size(); ++a) {
        const auto dist = topology.hop_distances(static_cast<NodeId>(a));
        for (std::size_t b = a + 1; b < dist.size(); ++b) {
          max_sep = std::max(max_sep, dist[b]);
          if (dist[b] >= spec.min_hop_separation)
            candidates.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
        }
      }
      std::shuffle(candidates.begin(), candidates.end(), rng);
      std::vector<char> used(topology.size(), 0);
      for (const auto& [a, b] : candidates) {
        if (static_cast<int>(plan.wormholes.size()) >= spec.wormhole_count) break;
        if (used[static_cast<std::size_t>(a)] || used[static_cast<std::size_t>(b)]) continue;
        used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = 1;
        plan.wormholes.push_back({a, b, spec.min_hop_separation});
      }
      if (static_cast<int>(plan.wormholes.size()) < spec.wormhole_count)
        throw InfeasibleWormholeError(spec.min_hop_separation, max_sep);
      break;
    }
  }
  plan.validate(topology);
  return plan;
}

}  // namespace stimnet::netsim
