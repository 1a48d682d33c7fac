#include "dac/keypoint_coder.hpp"

#include <cmath>
#include <string>

#include "dac/byte_io.hpp"
#include "dac/deflate.hpp"
#include "dac/error.hpp"
#include "dac/half.hpp"

namespace dac {

QuantizedKeypoints quantize_keypoints(const KeypointSet& kp) {
    QuantizedKeypoints q;
    q.values.reserve(kp.size() * kValuesPerKeypoint);
    for (std::size_t k = 0; k < kp.size(); ++k) {
        const auto& p = kp[k];
        for (double v : {p.x, p.y, p.a, p.b, p.d}) {
            if (!std::isfinite(v) || std::fabs(v) > kHalfMax)
                throw Error("keypoint " + std::to_string(k) + " value not representable as binary16");
            q.values.push_back(float_to_half(v));
        }
    }
    return q;
}

DequantizedKeypoints dequantize_keypoints(const QuantizedKeypoints& q) {
    if (q.values.size() % kValuesPerKeypoint != 0) throw Error("element count mismatch");
    DequantizedKeypoints out;
    out.keypoints.points.resize(q.keypoint_count());
    for (std::size_t k = 0; k < q.keypoint_count(); ++k) {
        const auto* v = &q.values[k * kValuesPerKeypoint];
        Keypoint p{half_to_float(v[0]), half_to_float(v[1]), half_to_float(v[2]), half_to_float(v[3]),
                   half_to_float(v[4])};
        for (double c : {p.x, p.y, p.a, p.b, p.d})
            if (!std::isfinite(c)) throw Error("non-finite keypoint value at keypoint " + std::to_string(k));
        if (regularize_jacobian(p)) out.regularized.push_back(static_cast<int>(k));
        out.keypoints[k] = p;
    }
    return out;
}

std::vector<std::uint8_t> encode_keypoints(const QuantizedKeypoints& q) {
    std::vector<std::uint8_t> raw;
    ByteWriter rw(raw);
    for (std::uint16_t v : q.values) rw.u16(v);
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    w.varint(raw.size());
    w.bytes(deflate_raw(raw));
    return out;
}

QuantizedKeypoints decode_keypoint_block(std::span<const std::uint8_t> bytes, int expected_count) {
    const std::size_t expected_len = static_cast<std::size_t>(expected_count) * kValuesPerKeypoint * 2;
    ByteReader r(bytes);
    std::uint64_t raw_len = 0;
    try {
        raw_len = r.varint();
    } catch (const TruncatedError&) {
        throw Error("corrupt keypoint stream: truncated length");
    }
    if (raw_len != expected_len) throw Error("element count mismatch");
    const auto raw = inflate_raw(r.bytes(r.remaining()), expected_len);
    QuantizedKeypoints q;
    ByteReader rr(raw);
    q.values.resize(expected_len / 2);
    for (auto& v : q.values) v = rr.u16();
    return q;
}

DequantizedKeypoints decode_keypoints(std::span<const std::uint8_t> bytes, int expected_count) {
    return dequantize_keypoints(decode_keypoint_block(bytes, expected_count));
}

KeypointSet transmit_roundtrip(const KeypointSet& kp) {
    return dequantize_keypoints(quantize_keypoints(kp)).keypoints;
}

}  // namespace dac
