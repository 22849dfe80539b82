#include "stimnet/features/feature_set.hpp"

#include <cmath>

namespace stimnet::features {
namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "M1", "M2", "M3", "M4", "M5", "M6", "M7", "R1", "R2", "R3", "R4", "R5",
    "R6", "R7", "R8", "R9", "R10", "R11", "R12", "T1", "T2", "T3", "T4", "T5",
};

std::vector<Feature> all_features() {
  std::vector<Feature> out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) out.push_back(static_cast<Feature>(i));
  return out;
}

std::vector<Feature> without(std::vector<Feature> set, std::initializer_list<Feature> drop) {
  std::erase_if(set, [&](Feature f) {
    for (Feature d : drop)
      if (d == f) return true;
    return false;
  });
  return set;
}

}  // namespace

std::string_view feature_name(Feature f) { return kNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> parse_feature(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kNames[i] == name) return static_cast<Feature>(i);
  return std::nullopt;
}

std::string_view to_string(FeatureSetId id) {
  switch (id) {
    case FeatureSetId::f0: return "f0";
    case FeatureSetId::f1: return "f1";
    case FeatureSetId::f2: return "f2";
  }
  return "?";
}

FeatureSetId parse_feature_set(std::string_view text) {
  if (text == "f0" || text == "F0") return FeatureSetId::f0;
  if (text == "f1" || text == "F1") return FeatureSetId::f1;
  if (text == "f2" || text == "F2") return FeatureSetId::f2;
  throw ConfigError("unknown feature set '" + std::string(text) + "'");
}

const std::vector<Feature>& features_of(FeatureSetId id) {
  using F = Feature;
  static const std::vector<Feature> f0 = all_features();
  static const std::vector<Feature> f1 =
      without(f0, {F::M3, F::M4, F::M7, F::R1, F::R2, F::R3, F::R4});
  static const std::vector<Feature> f2 = without(f1, {F::M1});
  switch (id) {
    case FeatureSetId::f0: return f0;
    case FeatureSetId::f1: return f1;
    case FeatureSetId::f2: return f2;
  }
  return f0;
}

std::vector<std::string> feature_names(FeatureSetId id) {
  std::vector<std::string> out;
  for (Feature f : features_of(id)) out.emplace_back(feature_name(f));
  return out;
}

std::vector<std::string> composite_names(FeatureSetId id) {
  std::vector<std::string> out;
  for (const char* suffix : {"_L", "_R"})
    for (Feature f : features_of(id)) out.push_back(std::string(feature_name(f)) + suffix);
  return out;
}

int WindowSpec::count() const {
  if (!(size > 0.0)) throw ConfigError("window size must be positive");
  return static_cast<int>(std::floor(duration / size + 1e-9));
}

int WindowSpec::index_of(SimTime t) const {
  const auto rel = t - from_seconds(origin);
  if (rel.count() < 0) return -1;
  const auto w = static_cast<int>(rel.count() / from_seconds(size).count());
  return w < count() ? w : -1;
}

SimTime WindowSpec::begin(int w) const {
  return from_seconds(origin) + from_seconds(size) * w;
}

SimTime WindowSpec::end(int w) const { return begin(w + 1); }

std::vector<double> project(const LocalFeatureSample& sample, FeatureSetId id) {
  std::vector<double> out;
  const auto& set = features_of(id);
  out.reserve(set.size());
  for (Feature f : set) out.push_back(sample[f]);
  return out;
}

MissingRemoteError::MissingRemoteError()
    : DataError("no downstream feature report for this window") {}

CompositeVector compose(const LocalFeatureSample& local, const LocalFeatureSample* remote,
                        FeatureSetId id) {
  if (remote == nullptr) throw MissingRemoteError();
  if (remote->window_index != local.window_index || remote->window_size != local.window_size)
    throw DataError("local and remote samples cover different windows");
  CompositeVector out;
  out.set = id;
  out.window_index = local.window_index;
  out.values = project(local, id);
  const auto r = project(*remote, id);
  out.values.insert(out.values.end(), r.begin(), r.end());
  return out;
}

}  // namespace stimnet::features
