#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stimnet::learn {

struct Folds {
  int count = 0;
  std::vector<int> fold_of;  // per row
  std::vector<std::string> warnings;

  std::vector<std::size_t> holdout(int fold) const;
  std::vector<std::size_t> training(int fold) const;
  /// Training mask for `fold` (1 = train).
  std::vector<char> training_mask(int fold) const;
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> splits() const;
};

/// Stratified assignment: each class is shuffled, then dealt round-robin,
/// continuing from the fold where the previous class stopped. Per-class
/// counts across folds differ by at most one. When the smallest class has
/// fewer members than n_folds, the fold count drops to max(2, that size).
Folds stratified_kfold(const std::vector<int>& labels, int n_folds, std::uint64_t seed);

}  // namespace stimnet::learn
