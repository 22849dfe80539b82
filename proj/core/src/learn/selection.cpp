#include "stimnet/learn/selection.hpp"

#include <algorithm>

#include "stimnet/common.hpp"

namespace stimnet::learn {

SelectionResult forward_selection(std::size_t n_features, const SubsetError& error) {
  SelectionResult out;
  out.weights.assign(n_features, 0.0);
  double current = error({});
  out.error_path.push_back(current);
  std::vector<char> taken(n_features, 0);
  while (out.selected.size() < n_features) {
    double best = current;
    std::size_t best_f = n_features;
    for (std::size_t f = 0; f < n_features; ++f) {
      if (taken[f]) continue;
      auto trial = out.selected;
      trial.push_back(f);
      const double e = error(trial);
      if (e < best - 1e-12) {
        best = e;
        best_f = f;
      }
    }
    if (best_f == n_features) break;
    taken[best_f] = 1;
    out.selected.push_back(best_f);
    out.weights[best_f] = 1.0;
    current = best;
    out.error_path.push_back(current);
  }
  return out;
}

std::vector<int> cv_predict(const PresortedDataset& data, const Folds& folds,
                            const std::vector<std::size_t>& features, const TreeParams& params) {
  const auto& d = data.data();
  if (folds.fold_of.size() != d.rows()) throw DataError("fold assignment does not match the dataset");
  std::vector<int> out(d.rows(), -1);
  for (int f = 0; f < folds.count; ++f) {
    const auto mask = folds.training_mask(f);
    if (std::find(mask.begin(), mask.end(), 1) == mask.end()) continue;
    const auto tree = train_tree(data, mask, features, params);
    for (std::size_t r = 0; r < d.rows(); ++r)
      if (!mask[r]) out[r] = tree.classify(d.row(r));
  }
  return out;
}

double cv_error(const PresortedDataset& data, const Folds& folds, const std::vector<std::size_t>& features,
                const TreeParams& params) {
  const auto pred = cv_predict(data, folds, features, params);
  const auto& d = data.data();
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) wrong += pred[r] != d.label(r);
  return static_cast<double>(wrong) / static_cast<double>(d.rows());
}

SelectionResult forward_selection(const PresortedDataset& data, const Folds& folds, const TreeParams& params) {
  return forward_selection(data.data().features(), [&](const std::vector<std::size_t>& features) {
    return cv_error(data, folds, features, params);
  });
}

SelectionResult forward_selection(const Dataset& data, int n_folds, std::uint64_t seed,
                                  const TreeParams& params) {
  const PresortedDataset sorted(data);
  const auto folds = stratified_kfold(data.labels(), n_folds, seed);
  return forward_selection(sorted, folds, params);
}

std::vector<double> aggregate_weights(const std::vector<std::vector<double>>& per_node) {
  if (per_node.empty()) return {};
  std::vector<double> out(per_node.front().size(), 0.0);
  for (const auto& w : per_node) {
    if (w.size() != out.size()) throw DataError("weight vectors differ in length");
    for (std::size_t i = 0; i < w.size(); ++i) out[i] += w[i];
  }
  for (auto& v : out) v /= static_cast<double>(per_node.size());
  return out;
}

}  // namespace stimnet::learn
