#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "stimnet/learn/dataset.hpp"

namespace stimnet::learn {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct TreeParams {
  std::size_t min_leaf = 5;
  std::size_t max_depth = 25;
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
    std::vector<std::size_t> histogram;

    bool leaf() const { return feature < 0; }
  };

  DecisionTree() = default;
  DecisionTree(std::size_t n_features, std::size_t n_classes, std::vector<Node> nodes);

  /// Values below a node's threshold go left.
  int classify(std::span<const double> row) const;

  std::size_t feature_count() const { return n_features_; }
  std::size_t class_count() const { return n_classes_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  /// Preorder, one node per line.
  void write(std::ostream& out) const;
  static DecisionTree read(std::istream& in);

 private:
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<Node> nodes_;
};

/// Per-feature row orders, sorted by value then row index. Built once per
/// dataset and shared by every tree trained on a row subset of it.
class PresortedDataset {
 public:
  explicit PresortedDataset(const Dataset& data);

  const Dataset& data() const { return *data_; }
  const std::vector<std::uint32_t>& order(std::size_t feature) const { return orders_[feature]; }

 private:
  const Dataset* data_;
  std::vector<std::vector<std::uint32_t>> orders_;
};

/// Greedy top-down induction maximizing information gain over midpoints
/// between consecutive distinct values. Stops on purity, when no split
/// gains anything, when a child would fall below min_leaf, or at max_depth.
/// Ties go to the lowest feature index, then the lowest threshold.
DecisionTree train_tree(const Dataset& data, const TreeParams& params = {});

/// Trains on the rows with in_training[row] != 0, using only `features`.
DecisionTree train_tree(const PresortedDataset& sorted, const std::vector<char>& in_training,
                        const std::vector<std::size_t>& features, const TreeParams& params = {});

}  // namespace stimnet::learn
