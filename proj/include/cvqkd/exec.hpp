#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cvqkd {

/// Selects the serial reference loop or the OpenMP kernel. Both produce the
/// same result for every kernel in this library; the serial path exists so
/// tests can check the parallel one against it.
enum class Exec { serial, parallel };

/// Packed 0/1 values, one byte per bit.
using Bits = std::vector<std::uint8_t>;

/// Floating reductions in the parallel kernels are accumulated per fixed-size
/// chunk and combined in chunk order, so results do not depend on thread count.
inline constexpr std::size_t kReductionChunk = 1 << 14;

} // namespace cvqkd
