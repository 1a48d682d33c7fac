#include "dac/half.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dac {

std::uint16_t float_to_half(double value) {
    const std::uint16_t sign = std::signbit(value) ? 0x8000 : 0;
    if (std::isnan(value)) return 0x7E00;
    const double a = std::fabs(value);
    if (a == 0) return sign;
    if (std::isinf(a)) return sign | 0x7C00;

    int e = 0;
    std::frexp(a, &e);
    int exp = std::max(e - 1, -14);
    // a / quantum is exact (power-of-two scaling); nearbyint rounds ties to even.
    double n = std::nearbyint(std::ldexp(a, 10 - exp));
    if (n >= 2048) {
        n /= 2;
        ++exp;
    }
    if (exp > 15) return sign | 0x7C00;
    const auto mant = static_cast<std::uint16_t>(n);
    if (mant < 1024) return sign | mant;  // subnormal
    return static_cast<std::uint16_t>(sign | ((exp + 15) << 10) | (mant - 1024));
}

double half_to_float(std::uint16_t bits) {
    const double sign = (bits & 0x8000) ? -1.0 : 1.0;
    const int exp = (bits >> 10) & 0x1F;
    const int mant = bits & 0x3FF;
    if (exp == 0) return sign * std::ldexp(mant, -24);
    if (exp == 31) return mant ? std::numeric_limits<double>::quiet_NaN() : sign * std::numeric_limits<double>::infinity();
    return sign * std::ldexp(1024 + mant, exp - 25);
}

}  // namespace dac
