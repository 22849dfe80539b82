#include "stimnet/features/monitor.hpp"

#include <algorithm>
#include <map>

namespace stimnet::features {

std::vector<NodeId> select_monitor_nodes(const std::vector<std::int64_t>& forwarded,
                                         const std::vector<std::size_t>& degrees, std::size_t k,
                                         std::vector<std::string>* warnings) {
  if (k == 0) throw ConfigError("monitor count must be at least 1");
  std::vector<NodeId> candidates;
  for (std::size_t i = 0; i < forwarded.size(); ++i)
    if (forwarded[i] > 0) candidates.push_back(static_cast<NodeId>(i));
  std::sort(candidates.begin(), candidates.end(), [&](NodeId a, NodeId b) {
    const auto ca = forwarded[static_cast<std::size_t>(a)];
    const auto cb = forwarded[static_cast<std::size_t>(b)];
    return ca != cb ? ca > cb : a < b;
  });

  auto degree = [&](NodeId n) {
    return static_cast<std::size_t>(n) < degrees.size() ? degrees[static_cast<std::size_t>(n)] : 0;
  };
  std::vector<NodeId> picked;
  std::map<std::size_t, int> used_degrees;
  std::size_t i = 0;
  while (i < candidates.size() && picked.size() < k) {
    std::size_t j = i;
    const auto count = forwarded[static_cast<std::size_t>(candidates[i])];
    while (j < candidates.size() && forwarded[static_cast<std::size_t>(candidates[j])] == count) ++j;
    std::vector<NodeId> group(candidates.begin() + static_cast<std::ptrdiff_t>(i),
                              candidates.begin() + static_cast<std::ptrdiff_t>(j));
    while (!group.empty() && picked.size() < k) {
      auto best = std::min_element(group.begin(), group.end(), [&](NodeId a, NodeId b) {
        const int ua = used_degrees[degree(a)];
        const int ub = used_degrees[degree(b)];
        return ua != ub ? ua < ub : a < b;
      });
      ++used_degrees[degree(*best)];
      picked.push_back(*best);
      group.erase(best);
    }
    i = j;
  }
  if (picked.size() < k && warnings)
    warnings->push_back("only " + std::to_string(picked.size()) + " forwarding nodes available, " +
                        std::to_string(k) + " requested");
  return picked;
}

std::vector<NodeId> select_monitor_nodes(const FeatureExtractor& extractor,
                                         const netsim::Topology& topology, std::size_t k,
                                         std::vector<std::string>* warnings) {
  std::vector<std::size_t> degrees(topology.size());
  for (std::size_t n = 0; n < topology.size(); ++n) degrees[n] = topology.degree(static_cast<NodeId>(n));
  auto counts = extractor.forwarded_counts();
  counts.resize(std::max(counts.size(), topology.size()), 0);
  return select_monitor_nodes(counts, degrees, k, warnings);
}

}  // namespace stimnet::features
