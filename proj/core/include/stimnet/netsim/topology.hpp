#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stimnet/common.hpp"

namespace stimnet::netsim {

struct NodePosition {
  NodeId id = kNoNode;
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

struct TopologyParams {
  std::size_t node_count = 200;
  double area_width = 1000.0;
  double area_height = 1000.0;
  double radio_radius = 100.0;
  // Smallest acceptable connected component; 8 nodes can host a 7-hop path.
  std::size_t min_component_size = 8;
};

/// Static unit-disk graph. Node ids are dense indices 0..n-1.
class Topology {
 public:
  Topology(std::vector<NodePosition> nodes, double radio_radius, double area_width,
           double area_height);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodePosition>& nodes() const { return nodes_; }
  const NodePosition& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  double radio_radius() const { return radio_radius_; }
  double area_width() const { return area_width_; }
  double area_height() const { return area_height_; }

  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }
  /// Sorted ascending.
  const std::vector<NodeId>& neighbors(NodeId id) const;
  bool adjacent(NodeId a, NodeId b) const;
  std::size_t degree(NodeId id) const { return neighbors(id).size(); }
  double mean_degree() const;
  std::size_t edge_count() const;

  /// Breadth-first hop distances from `from`; -1 marks unreachable nodes.
  std::vector<int> hop_distances(NodeId from) const;
  /// One shortest path (lowest-id predecessor tie-break), empty if unreachable.
  std::vector<NodeId> shortest_path(NodeId from, NodeId to) const;
  /// Connected components, largest first.
  std::vector<std::vector<NodeId>> components() const;

 private:
  std::vector<NodePosition> nodes_;
  double radio_radius_;
  double area_width_;
  double area_height_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Uniform random placement; rejects layouts without a component of
/// `min_component_size` nodes.
Topology build_topology(const TopologyParams& params, std::uint64_t seed);

}  // namespace stimnet::netsim
