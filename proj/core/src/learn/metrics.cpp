#include "stimnet/learn/metrics.hpp"

#include <cmath>

#include "stimnet/common.hpp"

namespace stimnet::learn {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : k_(classes), counts_(classes * classes, 0) {}

void ConfusionMatrix::add(int truth, int predicted, std::size_t count) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= k_ ||
      static_cast<std::size_t>(predicted) >= k_)
    throw DataError("class label out of range for confusion matrix");
  counts_[static_cast<std::size_t>(truth) * k_ + static_cast<std::size_t>(predicted)] += count;
}

std::size_t ConfusionMatrix::at(int truth, int predicted) const {
  return counts_[static_cast<std::size_t>(truth) * k_ + static_cast<std::size_t>(predicted)];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::size_t ConfusionMatrix::actual(int c) const {
  std::size_t t = 0;
  for (std::size_t p = 0; p < k_; ++p) t += at(c, static_cast<int>(p));
  return t;
}

std::size_t ConfusionMatrix::predicted(int c) const {
  std::size_t t = 0;
  for (std::size_t a = 0; a < k_; ++a) t += at(static_cast<int>(a), c);
  return t;
}

ConfusionMatrix ConfusionMatrix::merged(int normal_class) const {
  ConfusionMatrix out(2);
  for (std::size_t a = 0; a < k_; ++a)
    for (std::size_t p = 0; p < k_; ++p)
      out.add(static_cast<int>(a) != normal_class, static_cast<int>(p) != normal_class,
              at(static_cast<int>(a), static_cast<int>(p)));
  return out;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (k_ == 0) *this = ConfusionMatrix(other.k_);
  if (other.k_ != k_) throw DataError("confusion matrices differ in class count");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ClassMetrics class_metrics(const ConfusionMatrix& m, int c) {
  ClassMetrics out;
  out.support = m.actual(c);
  const auto hit = m.correct(c);
  const auto fp = m.false_positives(c);
  if (out.support > 0) out.detection_rate = 100.0 * static_cast<double>(hit) / static_cast<double>(out.support);
  if (fp + hit > 0) out.fp_rate = 100.0 * static_cast<double>(fp) / static_cast<double>(fp + hit);
  const auto others = m.total() - out.support;
  if (others > 0) out.false_alarm_rate = 100.0 * static_cast<double>(fp) / static_cast<double>(others);
  return out;
}

Metrics evaluate(const ConfusionMatrix& m, int normal_class) {
  if (m.total() == 0) throw DataError("cannot evaluate an empty confusion matrix");
  Metrics out;
  out.confusion = m;
  std::size_t wrong = 0;
  for (std::size_t c = 0; c < m.classes(); ++c) {
    out.per_class.push_back(class_metrics(m, static_cast<int>(c)));
    wrong += m.false_positives(static_cast<int>(c));
  }
  out.any_misbehavior = class_metrics(m.merged(normal_class), 1);
  out.classification_error = 100.0 * static_cast<double>(wrong) / static_cast<double>(m.total());
  return out;
}

Metrics evaluate(const std::vector<int>& predictions, const std::vector<int>& truth, std::size_t classes,
                 int normal_class) {
  if (predictions.size() != truth.size()) throw DataError("predictions and labels differ in length");
  if (truth.empty()) throw DataError("cannot evaluate an empty prediction set");
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predictions[i]);
  return evaluate(m, normal_class);
}

Interval ci95(const std::vector<double>& values) {
  if (values.size() < 2) throw DataError("a confidence interval needs at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * s / std::sqrt(n)};
}

}  // namespace stimnet::learn
