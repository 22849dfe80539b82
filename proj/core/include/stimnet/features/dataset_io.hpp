#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stimnet/features/labeling.hpp"

namespace stimnet::features {

/// f0 is the local 24-feature vector; F0/F1/F2 are local-remote composites.
enum class DatasetKind { f0, F0, F1, F2 };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view text);
FeatureSetId feature_set_of(DatasetKind kind);

struct DatasetRow {
  NodeId observer = kNoNode;
  NodeId neighbor = kNoNode;
  int window_index = 0;
  double window_size = 0.0;
  std::vector<double> values;
  Label label = Label::none;
};

struct DatasetTable {
  std::vector<std::string> feature_names;
  std::vector<DatasetRow> rows;
};

/// Rows follow the order of `samples`, so tables of different kinds built
/// from the same samples pair up row by row.
DatasetTable make_table(const std::vector<PairedSample>& samples, DatasetKind kind);
void append(DatasetTable& into, const DatasetTable& more);

/// Tab-separated: observer, neighbor, window_index, window_size, features, label.
void write_dataset(std::ostream& out, const DatasetTable& table);
/// Throws DataError naming the offending line.
DatasetTable read_dataset(std::istream& in);

}  // namespace stimnet::features
