#pragma once

#include <cstdint>

namespace dac {

/// IEEE 754 binary16 <-> binary64. Rounding is to nearest, ties to even; overflow
/// produces infinity (callers range-check first).
std::uint16_t float_to_half(double value);
double half_to_float(std::uint16_t bits);

inline constexpr double kHalfMax = 65504.0;

}  // namespace dac
