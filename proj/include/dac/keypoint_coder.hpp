#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dac/motion_model.hpp"

namespace dac {

inline constexpr int kValuesPerKeypoint = 5;  // x, y, a, b, d

/// M x 5 binary16 values, keypoint-major (x, y, a, b, d per keypoint).
struct QuantizedKeypoints {
    std::vector<std::uint16_t> values;

    std::size_t keypoint_count() const { return values.size() / kValuesPerKeypoint; }
    friend bool operator==(const QuantizedKeypoints&, const QuantizedKeypoints&) = default;
};

/// Throws dac::Error for non-finite values or magnitudes above 65504.
QuantizedKeypoints quantize_keypoints(const KeypointSet& kp);

struct DequantizedKeypoints {
    KeypointSet keypoints;
    std::vector<int> regularized;  // indices whose Jacobian fell below the determinant floor
};

/// Back to working precision; re-applies the Jacobian floor.
DequantizedKeypoints dequantize_keypoints(const QuantizedKeypoints& q);

/// [varint raw_len][raw DEFLATE of little-endian binary16 values]
std::vector<std::uint8_t> encode_keypoints(const QuantizedKeypoints& q);

/// Inverse of encode_keypoints. Throws dac::Error("element count mismatch") unless the
/// stream holds exactly expected_count x 5 values, or on corrupt data.
QuantizedKeypoints decode_keypoint_block(std::span<const std::uint8_t> bytes, int expected_count);

DequantizedKeypoints decode_keypoints(std::span<const std::uint8_t> bytes, int expected_count);

/// The keypoints a decoder will see after transmission.
KeypointSet transmit_roundtrip(const KeypointSet& kp);

}  // namespace dac
