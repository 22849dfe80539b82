#include "stimnet/netsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

namespace stimnet::netsim {

Topology::Topology(std::vector<NodePosition> nodes, double radio_radius, double area_width,
                   double area_height)
    : nodes_(std::move(nodes)),
      radio_radius_(radio_radius),
      area_width_(area_width),
      area_height_(area_height) {
  if (!(radio_radius_ > 0.0)) throw ConfigError("radio_radius must be positive");
  if (!(area_width_ > 0.0) || !(area_height_ > 0.0))
    throw ConfigError("area dimensions must be positive");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id != static_cast<NodeId>(i))
      throw ConfigError("node ids must be unique and dense; expected " + std::to_string(i) +
                        " got " + std::to_string(n.id));
    if (n.x < 0.0 || n.x > area_width_ || n.y < 0.0 || n.y > area_height_)
      throw ConfigError("node " + std::to_string(n.id) + " lies outside the area");
  }

  const double r2 = radio_radius_ * radio_radius_;
  adjacency_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      const double dx = nodes_[i].x - nodes_[j].x;
      const double dy = nodes_[i].y - nodes_[j].y;
      if (dx * dx + dy * dy <= r2) {
        adjacency_[i].push_back(static_cast<NodeId>(j));
        adjacency_[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

const std::vector<NodeId>& Topology::neighbors(NodeId id) const {
  return adjacency_.at(static_cast<std::size_t>(id));
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  if (!contains(a) || !contains(b)) return false;
  const auto& list = neighbors(a);
  return std::binary_search(list.begin(), list.end(), b);
}

double Topology::mean_degree() const {
  if (nodes_.empty()) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(nodes_.size());
}

std::size_t Topology::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

std::vector<int> Topology::hop_distances(NodeId from) const {
  std::vector<int> dist(nodes_.size(), -1);
  if (!contains(from)) return dist;
  std::deque<NodeId> frontier{from};
  dist[static_cast<std::size_t>(from)] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : neighbors(u)) {
      auto& d = dist[static_cast<std::size_t>(v)];
      if (d < 0) {
        d = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<NodeId> Topology::shortest_path(NodeId from, NodeId to) const {
  const auto dist = hop_distances(to);
  if (!contains(from) || dist[static_cast<std::size_t>(from)] < 0) return {};
  std::vector<NodeId> path{from};
  NodeId cur = from;
  while (cur != to) {
    const int d = dist[static_cast<std::size_t>(cur)];
    for (NodeId v : neighbors(cur)) {
      if (dist[static_cast<std::size_t>(v)] == d - 1) {
        cur = v;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

std::vector<std::vector<NodeId>> Topology::components() const {
  std::vector<int> seen(nodes_.size(), 0);
  std::vector<std::vector<NodeId>> result;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (seen[i]) continue;
    std::vector<NodeId> comp;
    std::deque<NodeId> frontier{static_cast<NodeId>(i)};
    seen[i] = 1;
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      comp.push_back(u);
      for (NodeId v : neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          frontier.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    result.push_back(std::move(comp));
  }
  std::stable_sort(result.begin(), result.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return result;
}

Topology build_topology(const TopologyParams& params, std::uint64_t seed) {
  if (params.node_count < 2) throw ConfigError("node_count must be at least 2");
  if (!(params.radio_radius > 0.0)) throw ConfigError("radio_radius must be positive");
  std::mt19937_64 rng(mix_seed(seed, 0x70));
  std::uniform_real_distribution<double> ux(0.0, params.area_width);
  std::uniform_real_distribution<double> uy(0.0, params.area_height);
  std::vector<NodePosition> nodes;
  nodes.reserve(params.node_count);
  for (std::size_t i = 0; i < params.node_count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    nodes.push_back({static_cast<NodeId>(i), x, y});
  }
  Topology topo(std::move(nodes), params.radio_radius, params.area_width, params.area_height);
  const auto comps = topo.components();
  if (comps.empty() || comps.front().size() < params.min_component_size)
    throw ConfigError("placement has no connected component with at least " +
                      std::to_string(params.min_component_size) + " nodes (largest: " +
                      std::to_string(comps.empty() ? 0 : comps.front().size()) + ")");
  return topo;
}

}  // namespace stimnet::netsim
