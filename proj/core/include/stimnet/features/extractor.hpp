#pragma once

#include <cstdint>
#include <vector>

#include "stimnet/features/feature_set.hpp"
#include "stimnet/netsim/connection.hpp"
#include "stimnet/netsim/trace.hpp"

namespace stimnet::features {

/// Lifetimes the observer applies when replaying its own routing table.
struct RouteTableParams {
  double active_lifetime = 10.0;  // seconds a route stays valid without use
  double delete_period = 30.0;    // seconds an invalid entry stays listed
};

/// Read-only view over one run's trace. `connections` supplies the end
/// points of every connection id in the trace.
class FeatureExtractor {
 public:
  FeatureExtractor(const netsim::EventTrace& trace, const std::vector<netsim::Connection>& connections,
                   WindowSpec windows, RouteTableParams table = {});

  const WindowSpec& windows() const { return windows_; }
  int window_count() const { return window_count_; }
  std::size_t node_count() const { return by_observer_.size(); }

  /// One sample per window for the link observer -> neighbor. Passing
  /// kNoNode as neighbor yields node-level features only.
  std::vector<LocalFeatureSample> extract(NodeId observer, NodeId neighbor) const;

  /// Nodes the observer handed data packets to, ascending.
  std::vector<NodeId> data_successors(NodeId observer) const;

  /// Per window, the node most often chosen as next hop by `node` for data
  /// it received from `from` (ties to the lowest id); kNoNode when `node`
  /// forwarded nothing from `from` in that window.
  std::vector<NodeId> next_hops(NodeId node, NodeId from) const;

  /// Data packets each node transmitted on behalf of others.
  std::vector<std::int64_t> forwarded_counts() const;

 private:
  const netsim::TraceEvent& event(std::uint32_t i) const { return trace_.events[i]; }
  NodeId source_of(ConnectionId c) const;
  NodeId destination_of(ConnectionId c) const;

  void link_features(NodeId observer, NodeId neighbor, std::vector<LocalFeatureSample>& out) const;
  void node_features(NodeId observer, std::vector<LocalFeatureSample>& out) const;
  void routing_table_features(NodeId observer, std::vector<LocalFeatureSample>& out) const;
  void transport_features(NodeId observer, std::vector<LocalFeatureSample>& out) const;

  const netsim::EventTrace& trace_;
  const std::vector<netsim::Connection>& connections_;
  WindowSpec windows_;
  RouteTableParams table_;
  int window_count_;
  std::vector<std::vector<std::uint32_t>> by_observer_;
};

}  // namespace stimnet::features
