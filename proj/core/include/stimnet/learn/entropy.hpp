#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stimnet::learn {

/// Base-2 entropy of a class histogram.
double entropy(std::span<const std::size_t> counts);

/// H(parent) minus the size-weighted entropy of the two children, in bits.
/// Throws DataError when a child is empty or the children do not add up.
double information_gain(std::span<const std::size_t> parent, std::span<const std::size_t> left,
                        std::span<const std::size_t> right);

/// Same, from label lists.
double information_gain(std::span<const int> parent, std::span<const int> left,
                        std::span<const int> right);

}  // namespace stimnet::learn
