#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace stimnet::learn {

/// Counts indexed [truth][predicted].
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes);

  void add(int truth, int predicted, std::size_t count = 1);
  std::size_t at(int truth, int predicted) const;
  std::size_t classes() const { return k_; }
  std::size_t total() const;

  std::size_t actual(int c) const;     // n_c
  std::size_t predicted(int c) const;  // column total
  std::size_t correct(int c) const { return at(c, c); }
  std::size_t false_positives(int c) const { return predicted(c) - correct(c); }

  /// Two classes: 0 = normal, 1 = any other class.
  ConfusionMatrix merged(int normal_class) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::size_t> counts_;
};

struct ClassMetrics {
  std::size_t support = 0;                // n_c
  std::optional<double> detection_rate;   // c_c / n_c * 100, unset when n_c = 0
  double fp_rate = 0.0;                   // FP_c / (FP_c + c_c) * 100, 0 when nothing predicted c
  double false_alarm_rate = 0.0;          // FP_c / (rows not of class c) * 100
};

struct Metrics {
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  ClassMetrics any_misbehavior;  // merged view, class "not normal"
  double classification_error = 0.0;  // percent misclassified
};

ClassMetrics class_metrics(const ConfusionMatrix& m, int c);
Metrics evaluate(const ConfusionMatrix& m, int normal_class = 0);
Metrics evaluate(const std::vector<int>& predictions, const std::vector<int>& truth, std::size_t classes,
                 int normal_class = 0);

struct Interval {
  double mean = 0.0;
  double halfwidth = 0.0;
  double lower() const { return mean - halfwidth; }
  double upper() const { return mean + halfwidth; }
};

/// Normal approximation: mean +- 1.96 s / sqrt(n), s the sample deviation.
Interval ci95(const std::vector<double>& values);

}  // namespace stimnet::learn
