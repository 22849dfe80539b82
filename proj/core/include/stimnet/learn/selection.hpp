#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stimnet/learn/decision_tree.hpp"
#include "stimnet/learn/kfold.hpp"

namespace stimnet::learn {

/// Cross-validated error (fraction misclassified) of a feature subset.
using SubsetError = std::function<double(const std::vector<std::size_t>& features)>;

struct SelectionResult {
  std::vector<std::size_t> selected;  // in the order they were added
  std::vector<double> error_path;     // empty-set error, then after each addition
  std::vector<double> weights;        // 1 for selected features, else 0
  double residual_error() const { return error_path.back(); }
};

/// Greedy forward selection starting from the empty set. Each round adds the
/// feature with the lowest error if that strictly lowers the current error;
/// ties go to the lowest index.
SelectionResult forward_selection(std::size_t n_features, const SubsetError& error);

/// Out-of-fold predictions of trees trained on `features`.
std::vector<int> cv_predict(const PresortedDataset& data, const Folds& folds,
                            const std::vector<std::size_t>& features, const TreeParams& params);
double cv_error(const PresortedDataset& data, const Folds& folds, const std::vector<std::size_t>& features,
                const TreeParams& params);

/// Wrapper selection with decision trees scored on `folds`.
SelectionResult forward_selection(const PresortedDataset& data, const Folds& folds, const TreeParams& params);
SelectionResult forward_selection(const Dataset& data, int n_folds, std::uint64_t seed,
                                  const TreeParams& params = {});

/// Share of nodes whose selection included each feature.
std::vector<double> aggregate_weights(const std::vector<std::vector<double>>& per_node);

}  // namespace stimnet::learn
