#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dac {

// Raw DEFLATE (RFC 1951, no zlib/gzip wrapper) via zlib.
std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data, int level = 9);

// Throws dac::Error if the stream is corrupt or does not inflate to exactly expected_size bytes.
std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> data, std::size_t expected_size);

}  // namespace dac
