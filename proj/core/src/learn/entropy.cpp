#include "stimnet/learn/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "stimnet/common.hpp"

namespace stimnet::learn {

double entropy(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double information_gain(std::span<const std::size_t> parent, std::span<const std::size_t> left,
                        std::span<const std::size_t> right) {
  if (left.size() != parent.size() || right.size() != parent.size())
    throw DataError("class histograms differ in size");
  std::size_t nl = 0, nr = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (left[i] + right[i] != parent[i]) throw DataError("children do not partition the parent");
    nl += left[i];
    nr += right[i];
  }
  if (nl == 0 || nr == 0) throw DataError("split has an empty child");
  const double n = static_cast<double>(nl + nr);
  return entropy(parent) - (static_cast<double>(nl) / n) * entropy(left) -
         (static_cast<double>(nr) / n) * entropy(right);
}

namespace {

std::vector<std::size_t> histogram(std::span<const int> labels, std::size_t classes) {
  std::vector<std::size_t> h(classes, 0);
  for (int l : labels) {
    if (l < 0) throw DataError("negative class label");
    ++h[static_cast<std::size_t>(l)];
  }
  return h;
}

}  // namespace

double information_gain(std::span<const int> parent, std::span<const int> left,
                        std::span<const int> right) {
  int top = 0;
  for (int l : parent) top = std::max(top, l);
  for (int l : left) top = std::max(top, l);
  for (int l : right) top = std::max(top, l);
  const auto k = static_cast<std::size_t>(top) + 1;
  const auto p = histogram(parent, k);
  const auto l = histogram(left, k);
  const auto r = histogram(right, k);
  return information_gain(p, l, r);
}

}  // namespace stimnet::learn
