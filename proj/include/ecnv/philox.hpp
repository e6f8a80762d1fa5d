#pragma once

#include <array>
#include <cstdint>

namespace ecnv {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11), the counter-based
/// generator also shipped by Random123, cuRAND and TensorFlow.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Uniform double in (0, 1] built from 53 random bits.
double uniform_open_closed(std::uint32_t hi, std::uint32_t lo) noexcept;

}  // namespace ecnv
