#include "stimnet/features/dataset_io.hpp"

#include <istream>
#include <ostream>

namespace stimnet::features {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

constexpr std::string_view kLeading[] = {"observer", "neighbor", "window_index", "window_size"};

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::f0: return "f0";
    case DatasetKind::F0: return "F0";
    case DatasetKind::F1: return "F1";
    case DatasetKind::F2: return "F2";
  }
  return "?";
}

DatasetKind parse_dataset_kind(std::string_view text) {
  if (text == "f0") return DatasetKind::f0;
  if (text == "F0") return DatasetKind::F0;
  if (text == "F1") return DatasetKind::F1;
  if (text == "F2") return DatasetKind::F2;
  throw ConfigError("unknown dataset kind '" + std::string(text) + "' (expected f0, F0, F1 or F2)");
}

FeatureSetId feature_set_of(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::f0:
    case DatasetKind::F0: return FeatureSetId::f0;
    case DatasetKind::F1: return FeatureSetId::f1;
    case DatasetKind::F2: return FeatureSetId::f2;
  }
  return FeatureSetId::f0;
}

DatasetTable make_table(const std::vector<PairedSample>& samples, DatasetKind kind) {
  DatasetTable t;
  const FeatureSetId set = feature_set_of(kind);
  t.feature_names = kind == DatasetKind::f0 ? feature_names(set) : composite_names(set);
  t.rows.reserve(samples.size());
  for (const auto& p : samples) {
    DatasetRow r;
    r.observer = p.local.observer;
    r.neighbor = p.local.neighbor;
    r.window_index = p.local.window_index;
    r.window_size = p.local.window_size;
    r.values = kind == DatasetKind::f0 ? project(p.local, set) : compose(p.local, &p.remote, set).values;
    r.label = p.label;
    t.rows.push_back(std::move(r));
  }
  return t;
}

void append(DatasetTable& into, const DatasetTable& more) {
  if (into.feature_names.empty()) into.feature_names = more.feature_names;
  if (into.feature_names != more.feature_names) throw DataError("cannot append datasets with different columns");
  into.rows.insert(into.rows.end(), more.rows.begin(), more.rows.end());
}

void write_dataset(std::ostream& out, const DatasetTable& table) {
  for (auto h : kLeading) out << h << '\t';
  for (const auto& n : table.feature_names) out << n << '\t';
  out << "label\n";
  for (const auto& r : table.rows) {
    out << r.observer << '\t' << r.neighbor << '\t' << r.window_index << '\t'
        << format_double(r.window_size) << '\t';
    for (double v : r.values) out << format_double(v) << '\t';
    out << netsim::to_string(r.label) << '\n';
  }
}

DatasetTable read_dataset(std::istream& in) {
  DatasetTable t;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("dataset is empty");
  const auto header = split_tabs(line);
  if (header.size() < 6 || header.back() != "label")
    throw DataError("line 1: malformed dataset header");
  for (std::size_t i = 0; i < 4; ++i)
    if (header[i] != kLeading[i]) throw DataError("line 1: expected column '" + std::string(kLeading[i]) + "'");
  for (std::size_t i = 4; i + 1 < header.size(); ++i) t.feature_names.emplace_back(header[i]);

  auto fail = [&](const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != header.size()) fail("expected " + std::to_string(header.size()) + " fields");
    DatasetRow r;
    const auto obs = parse_integer(f[0]);
    const auto nb = parse_integer(f[1]);
    const auto wi = parse_integer(f[2]);
    const auto ws = parse_double(f[3]);
    if (!obs || !nb || !wi || !ws) fail("malformed sample key");
    r.observer = static_cast<NodeId>(*obs);
    r.neighbor = static_cast<NodeId>(*nb);
    r.window_index = static_cast<int>(*wi);
    r.window_size = *ws;
    for (std::size_t i = 4; i + 1 < f.size(); ++i) {
      const auto v = parse_double(f[i]);
      if (!v) fail("feature column " + std::string(header[i]) + " is not a number");
      r.values.push_back(*v);
    }
    try {
      r.label = netsim::parse_misbehavior_kind(f.back());
    } catch (const Error&) {
      fail("unknown label '" + std::string(f.back()) + "'");
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace stimnet::features
