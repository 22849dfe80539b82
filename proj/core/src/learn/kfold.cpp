#include "stimnet/learn/kfold.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "stimnet/common.hpp"

namespace stimnet::learn {

std::vector<std::size_t> Folds::holdout(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> Folds::training(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

std::vector<char> Folds::training_mask(int fold) const {
  std::vector<char> out(fold_of.size());
  for (std::size_t i = 0; i < fold_of.size(); ++i) out[i] = fold_of[i] != fold;
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> Folds::splits() const {
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
  for (int f = 0; f < count; ++f) out.emplace_back(training(f), holdout(f));
  return out;
}

Folds stratified_kfold(const std::vector<int>& labels, int n_folds, std::uint64_t seed) {
  if (labels.empty()) throw DataError("cannot split an empty dataset");
  if (n_folds < 2) throw ConfigError("at least 2 folds are required");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Folds out;
  out.count = n_folds;
  std::size_t smallest = labels.size();
  for (const auto& [c, rows] : by_class) {
    smallest = std::min(smallest, rows.size());
    if (rows.size() < static_cast<std::size_t>(n_folds))
      out.warnings.push_back("class " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                             " samples, " + std::to_string(n_folds - static_cast<int>(rows.size())) +
                             " short of " + std::to_string(n_folds) + " folds");
  }
  if (smallest < static_cast<std::size_t>(n_folds)) {
    out.count = std::max(2, static_cast<int>(smallest));
    out.warnings.push_back("fold count reduced to " + std::to_string(out.count));
  }

  out.fold_of.assign(labels.size(), 0);
  int offset = 0;
  for (auto& [c, rows] : by_class) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(c) + 1));
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t j = 0; j < rows.size(); ++j)
      out.fold_of[rows[j]] = static_cast<int>((static_cast<std::size_t>(offset) + j) % static_cast<std::size_t>(out.count));
    offset = static_cast<int>((static_cast<std::size_t>(offset) + rows.size()) % static_cast<std::size_t>(out.count));
  }
  return out;
}

}  // namespace stimnet::learn
