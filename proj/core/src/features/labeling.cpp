#include "stimnet/features/labeling.hpp"

#include <map>
#include <utility>

namespace stimnet::features {

using netsim::MisbehaviorKind;

Label label_for(const netsim::MisbehaviorPlan& plan, NodeId neighbor) {
  switch (plan.kind) {
    case MisbehaviorKind::dropping:
    case MisbehaviorKind::delaying:
      return plan.affects(neighbor) ? plan.kind : Label::none;
    case MisbehaviorKind::wormhole:
      // Both ends tunnel, so whichever end s_i hands traffic to is the entry.
      return plan.is_wormhole_endpoint(neighbor) ? Label::wormhole : Label::none;
    case MisbehaviorKind::none:
      break;
  }
  return Label::none;
}

std::vector<LabeledSample> label_dataset(const std::vector<LocalFeatureSample>& samples,
                                         const netsim::MisbehaviorPlan& plan) {
  std::vector<LabeledSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({s, label_for(plan, s.neighbor)});
  return out;
}

namespace {

// Carries the last known hop forward into windows without one.
std::vector<NodeId> with_fallback(std::vector<NodeId> hops) {
  NodeId last = kNoNode;
  for (auto& h : hops) {
    if (h == kNoNode) {
      h = last;
    } else {
      last = h;
    }
  }
  return hops;
}

}  // namespace

std::vector<PairedSample> paired_samples(const FeatureExtractor& extractor,
                                         const netsim::MisbehaviorPlan& plan, NodeId observer,
                                         ExclusionCounts* excluded) {
  std::vector<PairedSample> out;
  ExclusionCounts counts;
  std::map<std::pair<NodeId, NodeId>, std::vector<LocalFeatureSample>> remote_cache;
  std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> hop_cache;

  auto hops_of = [&](NodeId node, NodeId from) -> const std::vector<NodeId>& {
    auto key = std::make_pair(node, from);
    auto it = hop_cache.find(key);
    if (it == hop_cache.end()) it = hop_cache.emplace(key, with_fallback(extractor.next_hops(node, from))).first;
    return it->second;
  };

  for (NodeId neighbor : extractor.data_successors(observer)) {
    const auto local = extractor.extract(observer, neighbor);
    const auto& downstream = hops_of(neighbor, observer);
    const Label label = label_for(plan, neighbor);
    for (std::size_t w = 0; w < local.size(); ++w) {
      const auto& s = local[w];
      if (!s.traffic_present) {
        ++counts.no_traffic;
        continue;
      }
      if (!s.has(Feature::M3)) {
        ++counts.no_watchdog;
        continue;
      }
      const NodeId far = downstream[w];
      if (far == kNoNode) {
        ++counts.no_downstream;
        continue;
      }
      const NodeId far_next = hops_of(far, neighbor)[w];
      auto key = std::make_pair(far, far_next);
      auto it = remote_cache.find(key);
      if (it == remote_cache.end()) it = remote_cache.emplace(key, extractor.extract(far, far_next)).first;
      out.push_back({s, it->second[w], label});
    }
  }
  if (excluded) *excluded += counts;
  return out;
}

}  // namespace stimnet::features
