#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "stimnet/common.hpp"
#include "stimnet/learn/dataset.hpp"
#include "stimnet/learn/decision_tree.hpp"
#include "stimnet/learn/entropy.hpp"
#include "stimnet/learn/kfold.hpp"
#include "stimnet/learn/metrics.hpp"
#include "stimnet/learn/selection.hpp"

using namespace stimnet;
using namespace stimnet::learn;

namespace {

double h(std::initializer_list<double> p) {
  double out = 0;
  for (double x : p)
    if (x > 0) out -= x * std::log2(x);
  return out;
}

Dataset make(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels, std::size_t classes) {
  Dataset d(rows.front().size(), classes);
  for (std::size_t i = 0; i < rows.size(); ++i) d.add(rows[i], labels[i]);
  return d;
}

std::size_t training_errors(const DecisionTree& t, const Dataset& d) {
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) wrong += t.classify(d.row(r)) != d.label(r);
  return wrong;
}

}  // namespace

TEST_CASE("information gain examples") {
  const std::vector<int> parent{0, 0, 1, 1};
  CHECK(information_gain(std::span<const int>(parent), std::vector<int>{0, 0}, std::vector<int>{1, 1}) ==
        doctest::Approx(1.0));
  CHECK(information_gain(std::span<const int>(parent), std::vector<int>{0, 1}, std::vector<int>{0, 1}) ==
        doctest::Approx(0.0));
  const std::vector<int> p2{0, 0, 0, 1};
  const double oracle = h({0.75, 0.25}) - 0.5 * h({1.0}) - 0.5 * h({0.5, 0.5});
  CHECK(information_gain(std::span<const int>(p2), std::vector<int>{0, 0}, std::vector<int>{0, 1}) ==
        doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(0.3113).epsilon(1e-4));
  CHECK_THROWS_AS(information_gain(std::span<const int>(p2), std::vector<int>{}, std::vector<int>{0, 0, 0, 1}),
                  DataError);
}

TEST_CASE("entropy of histograms") {
  CHECK(entropy(std::vector<std::size_t>{5}) == 0.0);
  CHECK(entropy(std::vector<std::size_t>{2, 2}) == doctest::Approx(1.0));
  CHECK(entropy(std::vector<std::size_t>{1, 1, 1, 1}) == doctest::Approx(2.0));
  CHECK(entropy(std::vector<std::size_t>{3, 0, 1}) == doctest::Approx(h({0.75, 0.25})));
}

TEST_CASE("gain is non-negative and zero for proportional children") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> l(3), r(3), p(3);
    for (int c = 0; c < 3; ++c) {
      l[c] = rng() % 6;
      r[c] = rng() % 6;
      p[c] = l[c] + r[c];
    }
    if (std::accumulate(l.begin(), l.end(), 0u) == 0 || std::accumulate(r.begin(), r.end(), 0u) == 0) continue;
    CHECK(information_gain(p, l, r) >= -1e-12);
  }
  CHECK(information_gain(std::vector<std::size_t>{4, 2}, std::vector<std::size_t>{2, 1},
                         std::vector<std::size_t>{2, 1}) == doctest::Approx(0.0));
}

TEST_CASE("tree on trivial datasets") {
  SUBCASE("single class gives one leaf") {
    const auto d = make({{1}, {2}, {3}}, {1, 1, 1}, 2);
    const auto t = train_tree(d, {1, kUnbounded});
    CHECK(t.nodes().size() == 1);
    CHECK(t.depth() == 0);
    CHECK(t.classify(std::vector<double>{100}) == 1);
  }
  SUBCASE("one threshold separates") {
    const auto d = make({{0.0, 5}, {1.0, 5}, {2.0, 5}, {3.0, 5}}, {0, 0, 1, 1}, 2);
    const auto t = train_tree(d, {1, kUnbounded});
    CHECK(t.depth() == 1);
    REQUIRE(t.nodes()[0].feature == 0);
    CHECK(t.nodes()[0].threshold == doctest::Approx(1.5));
    CHECK(t.classify(std::vector<double>{1.49, 0}) == 0);
    CHECK(t.classify(std::vector<double>{1.5, 0}) == 1);
    CHECK(training_errors(t, d) == 0);
  }
  SUBCASE("ties go to the lowest feature") {
    const auto d = make({{0, 0}, {1, 1}}, {0, 1}, 2);
    const auto t = train_tree(d, {1, kUnbounded});
    CHECK(t.nodes()[0].feature == 0);
  }
  SUBCASE("contradictory duplicates end in a majority leaf") {
    const auto d = make({{1}, {1}, {1}}, {0, 1, 1}, 2);
    const auto t = train_tree(d, {1, kUnbounded});
    CHECK(t.nodes().size() == 1);
    CHECK(t.classify(std::vector<double>{1}) == 1);
  }
  SUBCASE("dimension mismatch is rejected") {
    const auto d = make({{0}, {1}}, {0, 1}, 2);
    const auto t = train_tree(d, {1, kUnbounded});
    CHECK_THROWS(t.classify(std::vector<double>{1, 2}));
  }
}

TEST_CASE("stopping rules") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back((i / 2) % 2);
  }
  const auto d = make(rows, labels, 2);
  CHECK(train_tree(d, {1, 1}).depth() <= 1);
  CHECK(train_tree(d, {1, 3}).depth() <= 3);
  const auto t = train_tree(d, {5, kUnbounded});
  for (const auto& n : t.nodes())
    if (n.leaf()) CHECK(std::accumulate(n.histogram.begin(), n.histogram.end(), std::size_t{0}) >= 5);
  CHECK(training_errors(train_tree(d, {1, kUnbounded}), d) == 0);
}

TEST_CASE("xor needs a zero-gain first split") {
  Dataset d(2, 2);
  d.add(std::vector<double>{0, 0}, 0);
  d.add(std::vector<double>{0, 1}, 1);
  d.add(std::vector<double>{1, 0}, 1);
  d.add(std::vector<double>{1, 1}, 0);
  const auto t = train_tree(d, {1, kUnbounded});
  CHECK(training_errors(t, d) == 0);
}

TEST_CASE("consistent random datasets are fitted exactly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nf = 1 + rng() % 4;
    std::map<std::vector<double>, int> unique;
    while (unique.size() < 50) {
      std::vector<double> x(nf);
      for (auto& v : x) v = static_cast<double>(rng() % 97);
      unique.emplace(x, static_cast<int>(rng() % 3));
    }
    Dataset d(nf, 3);
    for (const auto& [x, y] : unique) d.add(x, y);
    const auto t = train_tree(d, {1, kUnbounded});
    CHECK(training_errors(t, d) == 0);
  }
}

TEST_CASE("order-preserving rescaling keeps training predictions") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Dataset a(3, 2), b(3, 2);
  for (int i = 0; i < 80; ++i) {
    std::vector<double> x{g(rng), g(rng), g(rng)};
    const int y = x[0] + 0.5 * x[1] > 0;
    a.add(x, y);
    x[1] = std::exp(x[1]) * 10 + 3;
    b.add(x, y);
  }
  const auto ta = train_tree(a, {3, kUnbounded});
  const auto tb = train_tree(b, {3, kUnbounded});
  for (std::size_t r = 0; r < a.rows(); ++r) CHECK(ta.classify(a.row(r)) == tb.classify(b.row(r)));
}

TEST_CASE("tree text round trip") {
  std::mt19937_64 rng(9);
  Dataset d(2, 3);
  for (int i = 0; i < 60; ++i) {
    const double x = static_cast<double>(rng() % 100) / 7.0, y = static_cast<double>(rng() % 100) / 3.0;
    d.add(std::vector<double>{x, y}, static_cast<int>(x + y) % 3);
  }
  const auto t = train_tree(d, {2, 6});
  std::stringstream ss;
  t.write(ss);
  const auto back = DecisionTree::read(ss);
  CHECK(back.nodes().size() == t.nodes().size());
  for (std::size_t r = 0; r < d.rows(); ++r) CHECK(back.classify(d.row(r)) == t.classify(d.row(r)));
  std::stringstream bad("tree 2 3\nsplit 0\n");
  CHECK_THROWS(DecisionTree::read(bad));
}

TEST_CASE("presorted training on a mask equals training on the subset") {
  std::mt19937_64 rng(21);
  Dataset d(3, 2);
  for (int i = 0; i < 120; ++i) {
    std::vector<double> x{static_cast<double>(rng() % 20), static_cast<double>(rng() % 20),
                          static_cast<double>(rng() % 20)};
    d.add(x, x[2] > 9 ? 1 : (x[0] > 15));
  }
  std::vector<char> mask(d.rows());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < d.rows(); ++i)
    if ((mask[i] = i % 3 != 0)) rows.push_back(i);
  const PresortedDataset sorted(d);
  const auto a = train_tree(sorted, mask, {0, 1, 2}, {2, kUnbounded});
  const auto b = train_tree(d.subset(rows), {2, kUnbounded});
  for (std::size_t r = 0; r < d.rows(); ++r) CHECK(a.classify(d.row(r)) == b.classify(d.row(r)));
}

TEST_CASE("stratified folds") {
  SUBCASE("exact divisibility") {
    std::vector<int> labels;
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < 10; ++i) labels.push_back(c);
    const auto f = stratified_kfold(labels, 10, 1);
    CHECK(f.count == 10);
    for (int k = 0; k < 10; ++k) {
      std::map<int, int> per;
      for (auto r : f.holdout(k)) ++per[labels[r]];
      CHECK(per.size() == 4);
      for (auto [c, n] : per) CHECK(n == 1);
    }
  }
  SUBCASE("uneven classes") {
    std::vector<int> labels(60, 0);
    labels.insert(labels.end(), 35, 1);
    const auto f = stratified_kfold(labels, 10, 7);
    std::set<std::size_t> seen;
    for (int k = 0; k < 10; ++k) {
      int a = 0, b = 0;
      for (auto r : f.holdout(k)) {
        CHECK(seen.insert(r).second);
        (labels[r] == 0 ? a : b)++;
      }
      CHECK(a == 6);
      CHECK((b == 3 || b == 4));
    }
    CHECK(seen.size() == labels.size());
  }
  SUBCASE("small class reduces the fold count") {
    std::vector<int> labels(30, 0);
    labels.insert(labels.end(), 4, 1);
    const auto f = stratified_kfold(labels, 10, 1);
    CHECK(f.count == 4);
    CHECK_FALSE(f.warnings.empty());
  }
  SUBCASE("deterministic under seed") {
    std::vector<int> labels(50);
    for (int i = 0; i < 50; ++i) labels[i] = i % 3;
    CHECK(stratified_kfold(labels, 5, 3).fold_of == stratified_kfold(labels, 5, 3).fold_of);
    CHECK(stratified_kfold(labels, 5, 3).fold_of != stratified_kfold(labels, 5, 4).fold_of);
  }
  CHECK_THROWS(stratified_kfold({}, 5, 1));
}

TEST_CASE("metrics") {
  SUBCASE("perfect predictions") {
    const std::vector<int> y{0, 1, 2, 1, 0};
    const auto m = evaluate(y, y, 3);
    for (int c = 0; c < 3; ++c) {
      CHECK(*m.per_class[c].detection_rate == 100.0);
      CHECK(m.per_class[c].fp_rate == 0.0);
    }
    CHECK(m.classification_error == 0.0);
  }
  SUBCASE("everything predicted as one class") {
    const std::vector<int> truth{0, 0, 1, 1};
    const std::vector<int> pred{0, 0, 0, 0};
    const auto m = evaluate(pred, truth, 2, 1);
    CHECK(*m.per_class[0].detection_rate == 100.0);
    CHECK(m.per_class[0].fp_rate == 50.0);
    CHECK(m.classification_error == 50.0);
    CHECK(*m.per_class[1].detection_rate == 0.0);
  }
  SUBCASE("merged view") {
    const std::vector<int> truth{0, 0, 1, 2, 3, 3};
    const std::vector<int> pred{0, 2, 2, 1, 0, 3};
    const auto m = evaluate(pred, truth, 4, 0);
    // Misbehavior rows 1,2,3 (indices 2..5): predicted non-normal for 3 of 4.
    CHECK(*m.any_misbehavior.detection_rate == doctest::Approx(75.0));
    // One normal row flagged: FP / (FP + c) = 1 / (1 + 3).
    CHECK(m.any_misbehavior.fp_rate == doctest::Approx(25.0));
    CHECK(m.any_misbehavior.false_alarm_rate == doctest::Approx(50.0));
  }
  SUBCASE("permutation invariance") {
    std::vector<int> truth{0, 1, 2, 0, 1, 2, 2, 0}, pred{0, 2, 2, 1, 1, 0, 2, 0};
    const auto a = evaluate(pred, truth, 3);
    std::reverse(truth.begin(), truth.end());
    std::reverse(pred.begin(), pred.end());
    const auto b = evaluate(pred, truth, 3);
    CHECK(a.confusion == b.confusion);
    CHECK(a.classification_error == b.classification_error);
  }
  SUBCASE("absent class has no detection rate") {
    const auto m = evaluate(std::vector<int>{0, 1}, std::vector<int>{0, 0}, 3);
    CHECK_FALSE(m.per_class[2].detection_rate.has_value());
  }
  CHECK_THROWS(evaluate(std::vector<int>{}, std::vector<int>{}, 2));
  CHECK_THROWS(evaluate(std::vector<int>{0}, std::vector<int>{0, 1}, 2));
}

TEST_CASE("confidence intervals") {
  CHECK(ci95({3, 3, 3}).halfwidth == 0.0);
  const auto c = ci95({0, 100});
  CHECK(c.mean == 50.0);
  CHECK(c.halfwidth == doctest::Approx(1.96 * std::sqrt(5000.0) / std::sqrt(2.0)));
  CHECK_THROWS(ci95({1}));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(10, 2);
  std::vector<double> small(400), big(1600);
  for (auto& v : small) v = g(rng);
  for (auto& v : big) v = g(rng);
  CHECK(ci95(big).halfwidth / ci95(small).halfwidth == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("forward selection") {
  SUBCASE("picks the single informative feature first") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Dataset d(5, 2);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x(5);
      for (auto& v : x) v = g(rng);
      d.add(x, x[3] > 0);
    }
    const auto r = forward_selection(d, 5, 1, {1, kUnbounded});
    REQUIRE_FALSE(r.selected.empty());
    CHECK(r.selected.front() == 3);
    CHECK(r.weights[3] == 1.0);
    for (std::size_t i = 1; i < r.error_path.size(); ++i) CHECK(r.error_path[i] < r.error_path[i - 1]);
  }
  SUBCASE("nothing beats the baseline") {
    const auto r = forward_selection(3, [](const std::vector<std::size_t>&) { return 0.4; });
    CHECK(r.selected.empty());
    CHECK(r.residual_error() == 0.4);
  }
  SUBCASE("ties go to the lowest index") {
    const auto r = forward_selection(3, [](const std::vector<std::size_t>& f) { return f.empty() ? 1.0 : 0.5; });
    CHECK(r.selected == std::vector<std::size_t>{0});
  }
}

TEST_CASE("weights are the share of nodes selecting a feature") {
  const auto w = aggregate_weights({{1, 0, 1}, {1, 0, 0}, {0, 0, 0}, {1, 1, 0}});
  CHECK(w == std::vector<double>{0.75, 0.25, 0.25});
  CHECK_THROWS(aggregate_weights({{1, 0}, {1}}));
}
