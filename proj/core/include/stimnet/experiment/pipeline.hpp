#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stimnet/experiment/run_io.hpp"
#include "stimnet/experiment/scenario.hpp"
#include "stimnet/features/dataset_io.hpp"
#include "stimnet/features/labeling.hpp"
#include "stimnet/learn/metrics.hpp"
#include "stimnet/learn/selection.hpp"

namespace stimnet::experiment {

// Class indices used by every learned model: normal, dropping, delaying, wormhole.
inline constexpr std::size_t kClassCount = 4;
inline constexpr int kNormal = 0;

int class_index(features::Label label);
std::vector<std::string> class_names();

RunData simulate_run(const Config& config, std::shared_ptr<const netsim::Topology> topology,
                     netsim::MisbehaviorKind kind, std::uint64_t seed);

/// Monitors from forwarding totals summed over every run.
std::vector<NodeId> choose_monitors(const std::vector<std::int64_t>& forwarded_total,
                                    const netsim::Topology& topology, std::size_t k,
                                    std::vector<std::string>* warnings = nullptr);

struct NodeTables {
  NodeId node = kNoNode;
  std::map<features::DatasetKind, features::DatasetTable> tables;
  features::ExclusionCounts excluded;
};

struct WindowData {
  double window = 0.0;
  std::vector<NodeTables> nodes;  // in monitor order
};

/// Appends one run's rows for every monitor. Rows of different kinds stay paired.
void extract_run(const Config& config, const RunData& run, const std::vector<NodeId>& monitors,
                 const std::vector<features::DatasetKind>& kinds, WindowData& into);

/// Rows whose class has at least `min_samples` members; dropped classes are reported.
std::vector<char> usable_rows(const std::vector<int>& labels, std::size_t min_samples,
                              std::vector<std::string>* warnings = nullptr);
learn::Dataset to_dataset(const features::DatasetTable& table, const std::vector<char>& keep);
std::vector<int> table_labels(const features::DatasetTable& table);

struct NodeEvaluation {
  NodeId node = kNoNode;
  std::size_t rows = 0;
  int folds = 0;
  learn::SelectionResult selection;
  learn::Metrics metrics;
  std::vector<std::string> warnings;
};

/// Forward selection, then cross-validated predictions with the chosen subset.
/// Empty when the node has fewer than two usable classes.
std::optional<NodeEvaluation> evaluate_single(const features::DatasetTable& table, const ExperimentConfig& x,
                                              std::uint64_t fold_seed);

struct CascadeNodeEvaluation {
  NodeEvaluation stage1;  // F2
  NodeEvaluation stage2;  // f0
  learn::Metrics cascade;
  std::size_t stage2_invocations = 0;
  std::size_t normal_rows = 0;
  std::size_t normal_invocations = 0;  // stage 2 runs triggered on normal rows

  double invocation_rate() const;
  double normal_invocation_rate() const;
};

/// Both stages share the folds; each fold's trees see only training rows.
std::optional<CascadeNodeEvaluation> evaluate_cascade(const features::DatasetTable& f2,
                                                      const features::DatasetTable& f0,
                                                      const ExperimentConfig& x, std::uint64_t fold_seed);

/// Percent values across nodes. Halfwidth is NaN with fewer than two nodes.
struct RateSummary {
  std::size_t nodes = 0;
  learn::Interval detection;
  learn::Interval fp;
};

struct BlockSummary {
  std::array<std::optional<RateSummary>, kClassCount> per_class;
  std::optional<RateSummary> any_misbehavior;
  std::optional<learn::Interval> error;
};

learn::Interval interval_of(const std::vector<double>& values);
BlockSummary summarize(const std::vector<learn::Metrics>& per_node);

std::uint64_t fold_seed(const Config& config, double window, NodeId node);

}  // namespace stimnet::experiment
