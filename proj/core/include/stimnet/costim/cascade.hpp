#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stimnet/learn/metrics.hpp"

namespace stimnet::costim {

using Classifier = std::function<int(std::span<const double>)>;
/// Produces the local f0 vector on demand; nullopt when it cannot.
using F0Provider = std::function<std::optional<std::vector<double>>()>;

/// Stage 1 sees the composite F2 vector, stage 2 the local f0 vector.
struct CascadeClassifier {
  Classifier stage1;
  Classifier stage2;
  int normal_label = 0;
  int negative_costim_timeout = 2;  // windows without a downstream report
};

enum class DecisionStatus { decided, inconclusive, awaiting_report };

struct CascadeDecision {
  bool suspicious = false;
  int label = 0;
  bool stage2_invoked = false;
  DecisionStatus status = DecisionStatus::decided;

  bool confirmed(int normal_label) const { return status == DecisionStatus::decided && label != normal_label; }
};

/// Stage 1 flags any non-normal class; stage 2 then decides and names the
/// class. Without an F2 vector nothing is decided until the report timeout
/// has expired, after which stage 2 runs directly.
CascadeDecision cascade_classify(const CascadeClassifier& cascade, const std::vector<double>* f2_vector,
                                 const F0Provider& f0_provider, bool report_timed_out = false);

/// Tracks missing downstream reports for one link.
class LinkMonitor {
 public:
  explicit LinkMonitor(int timeout_windows) : timeout_(timeout_windows) {}

  /// Call once per window; true when the report silence reached the timeout.
  bool end_window(bool report_received);
  int missing() const { return missing_; }

 private:
  int timeout_;
  int missing_ = 0;
};

struct CascadeEvaluation {
  learn::ConfusionMatrix confusion;
  std::vector<CascadeDecision> decisions;
  std::size_t stage2_invocations = 0;
  std::size_t inconclusive = 0;

  double stage2_invocation_rate() const {
    return decisions.empty() ? 0.0 : static_cast<double>(stage2_invocations) / static_cast<double>(decisions.size());
  }
  learn::Metrics metrics(int normal_label) const { return learn::evaluate(confusion, normal_label); }
};

/// Rows of `f2` and `f0` describe the same (node, window) pairs in the same
/// order; mismatched counts are rejected. Inconclusive rows stay out of the
/// confusion matrix and are counted separately.
CascadeEvaluation cascade_evaluate(const CascadeClassifier& cascade, const std::vector<std::vector<double>>& f2,
                                   const std::vector<std::vector<double>>& f0, const std::vector<int>& truth,
                                   std::size_t classes);

}  // namespace stimnet::costim
