#include "stimnet/learn/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "stimnet/common.hpp"
#include "stimnet/learn/entropy.hpp"

namespace stimnet::learn {

DecisionTree::DecisionTree(std::size_t n_features, std::size_t n_classes, std::vector<Node> nodes)
    : n_features_(n_features), n_classes_(n_classes), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvariantError("a tree needs at least one node");
}

int DecisionTree::classify(std::span<const double> row) const {
  if (row.size() != n_features_)
    throw DataError("vector has " + std::to_string(row.size()) + " features, tree expects " +
                    std::to_string(n_features_));
  std::size_t i = 0;
  while (!nodes_[i].leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes_[i].label;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

void DecisionTree::write(std::ostream& out) const {
  out << "tree " << n_features_ << ' ' << n_classes_ << '\n';
  // Nodes are stored in preorder already.
  for (const auto& n : nodes_) {
    if (n.leaf()) {
      out << "leaf " << n.label;
      for (auto c : n.histogram) out << ' ' << c;
    } else {
      out << "split " << n.feature << ' ' << format_double(n.threshold);
    }
    out << '\n';
  }
}

DecisionTree DecisionTree::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw DataError("model ends early after line " + std::to_string(line_no));
    ++line_no;
    return std::istringstream(line);
  };
  auto head = next();
  std::string tag;
  std::size_t nf = 0, nc = 0;
  if (!(head >> tag >> nf >> nc) || tag != "tree") throw DataError("line 1: expected 'tree <features> <classes>'");

  std::vector<Node> nodes;
  // Rebuild child links from preorder with an explicit stack of open splits.
  std::vector<std::size_t> open;
  do {
    auto ls = next();
    Node n;
    if (!(ls >> tag)) throw DataError("line " + std::to_string(line_no) + ": empty node");
    if (tag == "leaf") {
      if (!(ls >> n.label)) throw DataError("line " + std::to_string(line_no) + ": bad leaf");
      std::size_t c;
      while (ls >> c) n.histogram.push_back(c);
    } else if (tag == "split") {
      std::string thr;
      if (!(ls >> n.feature >> thr)) throw DataError("line " + std::to_string(line_no) + ": bad split");
      auto v = parse_double(thr);
      if (!v || n.feature < 0 || static_cast<std::size_t>(n.feature) >= nf)
        throw DataError("line " + std::to_string(line_no) + ": bad split");
      n.threshold = *v;
    } else {
      throw DataError("line " + std::to_string(line_no) + ": unknown node kind '" + tag + "'");
    }
    const auto idx = nodes.size();
    if (!open.empty()) {
      auto& parent = nodes[open.back()];
      if (parent.left < 0) {
        parent.left = static_cast<int>(idx);
      } else {
        parent.right = static_cast<int>(idx);
        open.pop_back();
      }
    }
    nodes.push_back(n);
    if (!nodes.back().leaf()) open.push_back(idx);
  } while (!open.empty());
  return DecisionTree(nf, nc, std::move(nodes));
}

PresortedDataset::PresortedDataset(const Dataset& data) : data_(&data) {
  orders_.resize(data.features());
  for (std::size_t f = 0; f < data.features(); ++f) {
    auto& o = orders_[f];
    o.resize(data.rows());
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return data.value(a, f) < data.value(b, f); });
  }
}

namespace {

class Builder {
 public:
  Builder(const PresortedDataset& sorted, const std::vector<char>& mask,
          const std::vector<std::size_t>& features, const TreeParams& params)
      : data_(sorted.data()),
        features_(features),
        min_leaf_(std::max<std::size_t>(params.min_leaf, 1)),
        max_depth_(params.max_depth),
        k_(data_.classes()) {
    std::sort(features_.begin(), features_.end());
    features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
    for (auto f : features_)
      if (f >= data_.features()) throw DataError("feature index out of range");
    if (features_.empty()) {
      for (std::uint32_t r = 0; r < data_.rows(); ++r)
        if (mask[r]) rows_.push_back(r);
    } else {
      work_.resize(features_.size());
      for (std::size_t j = 0; j < features_.size(); ++j) {
        const auto& o = sorted.order(features_[j]);
        work_[j].reserve(o.size());
        for (auto r : o)
          if (mask[r]) work_[j].push_back(r);
      }
    }
    buffer_.resize(size());
    goes_left_.assign(data_.rows(), 0);
  }

  DecisionTree build() {
    if (size() == 0) throw DataError("cannot train a tree on an empty dataset");
    grow(0, size(), 0);
    return DecisionTree(data_.features(), k_, std::move(nodes_));
  }

 private:
  std::size_t size() const { return features_.empty() ? rows_.size() : work_[0].size(); }
  const std::vector<std::uint32_t>& any_order() const { return features_.empty() ? rows_ : work_[0]; }

  int grow(std::size_t lo, std::size_t hi, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<std::size_t> hist(k_, 0);
    const auto& rows = any_order();
    for (std::size_t i = lo; i < hi; ++i) ++hist[static_cast<std::size_t>(data_.label(rows[i]))];
    {
      auto& node = nodes_[static_cast<std::size_t>(id)];
      node.label = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
      node.histogram = hist;
    }
    const std::size_t n = hi - lo;
    const bool pure = std::count_if(hist.begin(), hist.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || features_.empty() || depth >= max_depth_ || n < 2 * min_leaf_) return id;

    const double parent_h = entropy(hist);
    double best_gain = 0.0;
    std::size_t best_j = 0;
    std::size_t best_left = 0;
    double best_thr = 0.0;
    bool found = false;
    std::vector<std::size_t> left(k_), right(k_);
    for (std::size_t j = 0; j < features_.size(); ++j) {
      const auto f = features_[j];
      const auto& o = work_[j];
      std::fill(left.begin(), left.end(), 0);
      right = hist;
      for (std::size_t i = lo; i + 1 < hi; ++i) {
        const auto c = static_cast<std::size_t>(data_.label(o[i]));
        ++left[c];
        --right[c];
        const std::size_t nl = i + 1 - lo;
        if (nl < min_leaf_) continue;
        if (n - nl < min_leaf_) break;
        const double v = data_.value(o[i], f);
        const double next = data_.value(o[i + 1], f);
        if (!(v < next)) continue;
        const double gain = parent_h - (static_cast<double>(nl) / static_cast<double>(n)) * entropy(left) -
                            (static_cast<double>(n - nl) / static_cast<double>(n)) * entropy(right);
        if (!found || gain > best_gain + 1e-12) {
          best_gain = gain;
          best_j = j;
          best_left = nl;
          double mid = v + (next - v) / 2.0;
          if (!(mid > v)) mid = next;
          best_thr = mid;
          found = true;
        }
      }
    }
    if (!found) return id;

    const auto f = features_[best_j];
    for (std::size_t i = lo; i < hi; ++i) {
      const auto r = work_[best_j][i];
      goes_left_[r] = data_.value(r, f) < best_thr;
    }
    for (auto& o : work_) {
      std::size_t a = lo, b = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        if (goes_left_[o[i]]) {
          o[a++] = o[i];
        } else {
          buffer_[b++] = o[i];
        }
      }
      std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(b), o.begin() + static_cast<std::ptrdiff_t>(a));
    }
    const std::size_t mid = lo + best_left;
    nodes_[static_cast<std::size_t>(id)].feature = static_cast<int>(f);
    nodes_[static_cast<std::size_t>(id)].threshold = best_thr;
    const int l = grow(lo, mid, depth + 1);
    const int r = grow(mid, hi, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Dataset& data_;
  std::vector<std::size_t> features_;
  std::size_t min_leaf_;
  std::size_t max_depth_;
  std::size_t k_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::vector<std::uint32_t>> work_;
  std::vector<std::uint32_t> buffer_;
  std::vector<char> goes_left_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

DecisionTree train_tree(const PresortedDataset& sorted, const std::vector<char>& in_training,
                        const std::vector<std::size_t>& features, const TreeParams& params) {
  if (in_training.size() != sorted.data().rows()) throw DataError("training mask size mismatch");
  return Builder(sorted, in_training, features, params).build();
}

DecisionTree train_tree(const Dataset& data, const TreeParams& params) {
  if (data.empty()) throw DataError("cannot train a tree on an empty dataset");
  if (data.features() == 0) throw DataError("cannot train a tree without features");
  PresortedDataset sorted(data);
  std::vector<std::size_t> all(data.features());
  std::iota(all.begin(), all.end(), 0);
  return train_tree(sorted, std::vector<char>(data.rows(), 1), all, params);
}

}  // namespace stimnet::learn
