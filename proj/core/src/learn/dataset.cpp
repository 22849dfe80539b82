#include "stimnet/learn/dataset.hpp"

#include "stimnet/common.hpp"

namespace stimnet::learn {

Dataset::Dataset(std::size_t n_features, std::size_t n_classes)
    : n_features_(n_features), n_classes_(n_classes) {}

void Dataset::add(std::span<const double> row, int label) {
  if (row.size() != n_features_)
    throw DataError("row has " + std::to_string(row.size()) + " features, expected " +
                    std::to_string(n_features_));
  if (label < 0 || static_cast<std::size_t>(label) >= n_classes_)
    throw DataError("label " + std::to_string(label) + " out of range");
  x_.insert(x_.end(), row.begin(), row.end());
  labels_.push_back(label);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out(n_features_, n_classes_);
  out.feature_names = feature_names;
  out.class_names = class_names;
  for (std::size_t r : rows) out.add(row(r), labels_[r]);
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> out(n_classes_, 0);
  for (int l : labels_) ++out[static_cast<std::size_t>(l)];
  return out;
}

}  // namespace stimnet::learn
