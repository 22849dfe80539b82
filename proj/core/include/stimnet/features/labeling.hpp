#pragma once

#include <cstdint>
#include <vector>

#include "stimnet/features/extractor.hpp"
#include "stimnet/features/feature_set.hpp"
#include "stimnet/netsim/misbehavior.hpp"

namespace stimnet::features {

using Label = netsim::MisbehaviorKind;  // none reads as "normal"

/// Class of a window observed on the link towards `neighbor`.
Label label_for(const netsim::MisbehaviorPlan& plan, NodeId neighbor);

struct LabeledSample {
  LocalFeatureSample sample;
  Label label = Label::none;
};

std::vector<LabeledSample> label_dataset(const std::vector<LocalFeatureSample>& samples,
                                         const netsim::MisbehaviorPlan& plan);

/// One usable window of the link s_i -> s_{i+1}, joined with the report of
/// s_{i+2} (its own link towards the next hop) for the same window.
struct PairedSample {
  LocalFeatureSample local;
  LocalFeatureSample remote;
  Label label = Label::none;
};

struct ExclusionCounts {
  std::int64_t no_traffic = 0;     // no handshake towards s_{i+1}
  std::int64_t no_watchdog = 0;    // nothing sent that s_{i+1} should forward
  std::int64_t no_downstream = 0;  // s_{i+2} unknown

  ExclusionCounts& operator+=(const ExclusionCounts& o) {
    no_traffic += o.no_traffic;
    no_watchdog += o.no_watchdog;
    no_downstream += o.no_downstream;
    return *this;
  }
  std::int64_t total() const { return no_traffic + no_watchdog + no_downstream; }
};

/// Every usable window of every link leaving `observer`. A window is kept
/// when the link carried data handshakes and at least one packet that
/// s_{i+1} had to forward; other undefined features are stored as 0 with
/// `present` cleared. s_{i+2} is the dominant next hop of s_{i+1} for
/// traffic from s_i in that window, else the last one seen earlier.
std::vector<PairedSample> paired_samples(const FeatureExtractor& extractor,
                                         const netsim::MisbehaviorPlan& plan, NodeId observer,
                                         ExclusionCounts* excluded = nullptr);

}  // namespace stimnet::features
