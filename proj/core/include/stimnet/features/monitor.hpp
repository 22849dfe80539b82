#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stimnet/common.hpp"
#include "stimnet/features/extractor.hpp"
#include "stimnet/netsim/topology.hpp"

namespace stimnet::features {

/// Picks the k busiest forwarders. Equal counts are resolved towards the
/// degree least represented among nodes already picked, then by id. Nodes
/// that forwarded nothing are never picked; a shortfall is reported in
/// `warnings`.
std::vector<NodeId> select_monitor_nodes(const std::vector<std::int64_t>& forwarded,
                                         const std::vector<std::size_t>& degrees, std::size_t k,
                                         std::vector<std::string>* warnings = nullptr);

std::vector<NodeId> select_monitor_nodes(const FeatureExtractor& extractor,
                                         const netsim::Topology& topology, std::size_t k,
                                         std::vector<std::string>* warnings = nullptr);

}  // namespace stimnet::features
