#include "stimnet/costim/cascade.hpp"

#include "stimnet/common.hpp"

namespace stimnet::costim {

CascadeDecision cascade_classify(const CascadeClassifier& cascade, const std::vector<double>* f2_vector,
                                 const F0Provider& f0_provider, bool report_timed_out) {
  CascadeDecision d;
  d.label = cascade.normal_label;
  if (f2_vector != nullptr) {
    d.suspicious = cascade.stage1(*f2_vector) != cascade.normal_label;
  } else if (report_timed_out) {
    d.suspicious = true;
  } else {
    d.status = DecisionStatus::awaiting_report;
    return d;
  }
  if (!d.suspicious) return d;

  d.stage2_invoked = true;
  const auto f0 = f0_provider ? f0_provider() : std::nullopt;
  if (!f0) {
    d.status = DecisionStatus::inconclusive;
    return d;
  }
  d.label = cascade.stage2(*f0);
  return d;
}

bool LinkMonitor::end_window(bool report_received) {
  if (report_received) {
    missing_ = 0;
    return false;
  }
  ++missing_;
  return missing_ >= timeout_;
}

CascadeEvaluation cascade_evaluate(const CascadeClassifier& cascade, const std::vector<std::vector<double>>& f2,
                                   const std::vector<std::vector<double>>& f0, const std::vector<int>& truth,
                                   std::size_t classes) {
  if (f2.size() != f0.size() || f2.size() != truth.size())
    throw DataError("cascade evaluation needs one f0 vector and one label per F2 vector");
  CascadeEvaluation out;
  out.confusion = learn::ConfusionMatrix(classes);
  for (std::size_t i = 0; i < f2.size(); ++i) {
    const auto d = cascade_classify(cascade, &f2[i], [&]() -> std::optional<std::vector<double>> { return f0[i]; });
    if (d.stage2_invoked) ++out.stage2_invocations;
    if (d.status == DecisionStatus::decided) {
      out.confusion.add(truth[i], d.label);
    } else {
      ++out.inconclusive;
    }
    out.decisions.push_back(d);
  }
  return out;
}

}  // namespace stimnet::costim
