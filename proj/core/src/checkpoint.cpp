#include "nchf/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "nchf/error.hpp"

namespace nchf {
namespace {

constexpr std::array<char, 4> kMagic{'N', 'C', 'H', 'F'};

template <class U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFFu);
  }
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double value) { put_le(out, std::bit_cast<std::uint64_t>(value)); }

template <class U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorKind::kIo, "checkpoint truncated");
  U value = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) value |= static_cast<U>(bytes[k]) << (8 * k);
  return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_checkpoint(std::ostream& out, const FlowState& state) {
  const GridSpec& grid = state.f.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.res()));
  put_f64(out, grid.side());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(state.f.ambient_dim()));
  put_f64(out, state.t);
  for (double v : state.f.values()) put_f64(out, v);
  for (double v : state.w.w.values()) put_f64(out, v);
  if (!out) throw Error(ErrorKind::kIo, "checkpoint write failed");
}

void write_checkpoint(const std::filesystem::path& path, const FlowState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open checkpoint for writing: " + path.string());
  write_checkpoint(out, state);
}

FlowState read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorKind::kIo, "not an NCHF checkpoint (bad magic)");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(in);
  const auto res = get_le<std::uint32_t>(in);
  const double side = get_f64(in);
  const auto L = get_le<std::uint32_t>(in);
  const double t = get_f64(in);
  if (dim > 16 || res > (1u << 16) || L > 1024) throw Error(ErrorKind::kIo, "checkpoint header out of range");
  const GridSpec grid(static_cast<int>(dim), static_cast<int>(res), side);
  std::vector<double> f(grid.cell_count() * L);
  for (double& v : f) v = get_f64(in);
  std::vector<double> w(grid.cell_count());
  for (double& v : w) v = get_f64(in);
  FlowState state = FlowState::initial(MapField(grid, static_cast<int>(L), std::move(f)));
  state.t = t;
  state.w = ConformalField{ScalarField(grid, std::move(w))};
  return state;
}

FlowState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint: " + path.string());
  return read_checkpoint(in);
}

}  // namespace nchf
