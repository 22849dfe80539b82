#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stimnet/common.hpp"

namespace stimnet::features {

// Column order of every local vector.
enum class Feature : std::uint8_t {
  M1, M2, M3, M4, M5, M6, M7,
  R1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12,
  T1, T2, T3, T4, T5,
};

inline constexpr std::size_t kFeatureCount = 24;

std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);

enum class FeatureSetId { f0, f1, f2 };

std::string_view to_string(FeatureSetId id);
FeatureSetId parse_feature_set(std::string_view text);

/// f0: all 24; f1: without the promiscuous-mode features M3, M4, M7, R1-R4;
/// f2: f1 without M1.
const std::vector<Feature>& features_of(FeatureSetId id);
std::vector<std::string> feature_names(FeatureSetId id);
/// Composite names: local columns suffixed _L followed by remote ones with _R.
std::vector<std::string> composite_names(FeatureSetId id);

struct WindowSpec {
  double size = 50.0;      // seconds
  double origin = 0.0;     // seconds
  double duration = 3600;  // seconds covered by the trace's injection period

  /// Non-overlapping windows fully contained in [origin, origin + duration).
  int count() const;
  int index_of(SimTime t) const;  // -1 when outside every window
  SimTime begin(int w) const;
  SimTime end(int w) const;
};

struct LocalFeatureSample {
  NodeId observer = kNoNode;
  NodeId neighbor = kNoNode;
  int window_index = 0;
  double window_size = 0.0;
  std::array<double, kFeatureCount> values{};
  std::array<bool, kFeatureCount> present{};
  bool traffic_present = false;
  int pcts_tx = 0;
  int pcts_rx = 0;

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  bool has(Feature f) const { return present[static_cast<std::size_t>(f)]; }
};

std::vector<double> project(const LocalFeatureSample& sample, FeatureSetId id);

/// Raised when the downstream report for a window never arrived.
class MissingRemoteError : public DataError {
 public:
  MissingRemoteError();
};

struct CompositeVector {
  FeatureSetId set = FeatureSetId::f0;
  int window_index = 0;
  std::vector<double> values;  // local then remote

  std::vector<std::string> names() const { return composite_names(set); }
};

CompositeVector compose(const LocalFeatureSample& local, const LocalFeatureSample* remote,
                        FeatureSetId id);

}  // namespace stimnet::features
