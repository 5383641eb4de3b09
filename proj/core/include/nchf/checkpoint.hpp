#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "nchf/flow.hpp"

namespace nchf {

/// Binary checkpoint layout, all little-endian:
///   "NCHF" | u16 version | u32 dim | u32 res | f64 side | u32 L | f64 t |
///   f64 f[cells * L] | f64 w[cells]
/// Cells are in row-major order, map components contiguous per cell.
inline constexpr std::uint16_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const FlowState& state);
void write_checkpoint(const std::filesystem::path& path, const FlowState& state);

/// The restored state has zero velocity and step_count 0.
FlowState read_checkpoint(std::istream& in);
FlowState read_checkpoint(const std::filesystem::path& path);

}  // namespace nchf
