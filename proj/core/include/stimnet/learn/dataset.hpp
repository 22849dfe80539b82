#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stimnet::learn {

/// Dense row-major feature matrix with integer class labels 0..n_classes-1.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t n_features, std::size_t n_classes);

  void add(std::span<const double> row, int label);

  std::size_t rows() const { return labels_.size(); }
  std::size_t features() const { return n_features_; }
  std::size_t classes() const { return n_classes_; }
  bool empty() const { return labels_.empty(); }

  double value(std::size_t row, std::size_t feature) const { return x_[row * n_features_ + feature]; }
  std::span<const double> row(std::size_t r) const { return {x_.data() + r * n_features_, n_features_}; }
  int label(std::size_t r) const { return labels_[r]; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  Dataset subset(const std::vector<std::size_t>& rows) const;
  std::vector<std::size_t> class_counts() const;

 private:
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<double> x_;
  std::vector<int> labels_;
};

}  // namespace stimnet::learn
