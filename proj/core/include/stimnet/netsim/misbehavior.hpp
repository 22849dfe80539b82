#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stimnet/common.hpp"
#include "stimnet/netsim/topology.hpp"

namespace stimnet::netsim {

enum class MisbehaviorKind { none, dropping, delaying, wormhole };

std::string_view to_string(MisbehaviorKind kind);
MisbehaviorKind parse_misbehavior_kind(std::string_view text);

/// Private link between two colluding nodes. Traffic may cross it in either
/// direction; `entry`/`exit` only records the pair order.
struct Wormhole {
  NodeId entry = kNoNode;
  NodeId exit = kNoNode;
  int min_hop_separation = 15;
};

struct MisbehaviorPlan {
  MisbehaviorKind kind = MisbehaviorKind::none;
  std::vector<NodeId> affected_nodes;  // sorted; dropping/delaying only
  double probability = 0.30;
  double delay = 0.1;  // seconds
  std::vector<Wormhole> wormholes;

  bool affects(NodeId node) const;
  bool is_wormhole_endpoint(NodeId node) const;
  std::optional<NodeId> wormhole_partner(NodeId node) const;
  /// Throws ConfigError when the plan breaks its invariants for `topology`.
  void validate(const Topology& topology) const;
};

struct MisbehaviorSpec {
  MisbehaviorKind kind = MisbehaviorKind::none;
  int node_count = 27;         // dropping/delaying
  int wormhole_count = 3;
  int min_hop_separation = 15;
  double probability = 0.30;
  double delay = 0.1;
};

/// Raised when no set of disjoint node pairs satisfies the separation.
class InfeasibleWormholeError : public ConfigError {
 public:
  InfeasibleWormholeError(int requested, int max_separation);
  int max_achievable_separation() const { return max_separation_; }

 private:
  int max_separation_;
};

MisbehaviorPlan plan_misbehavior(const Topology& topology, const MisbehaviorSpec& spec,
                                 std::uint64_t seed);

}  // namespace stimnet::netsim
