#pragma once

#include <cstddef>
#include <span>

namespace nchf {

/// Pairwise (cascade) summation with a fixed split: leaves of at most 32
/// terms summed left to right, halves combined recursively. The split depends
/// only on the length, so the result is reproducible bit for bit.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace nchf
