#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dac/frame.hpp"

namespace dac {

inline constexpr int kMinQp = 0;
inline constexpr int kMaxQp = 51;

/// Throws std::invalid_argument("QP out of range") outside [0, 51].
void check_qp(int qp);

/// HEVC-style quantizer step: doubles every 6 QP, 1.0 at QP 4.
double qp_step(int qp);

enum class IntraCodecTag : std::uint8_t {
    ReferenceDct = 0x01,
    ExternalBpg = 0x02,  // reserved: raw external codec bytes
};

/// Opaque, codec-tagged still image payload. Byte 0 is the codec tag.
using IntraPayload = std::vector<std::uint8_t>;

/// Still-image codec seam. Implementations must be deterministic.
class IntraCodec {
public:
    virtual ~IntraCodec() = default;
    virtual IntraCodecTag tag() const = 0;
    virtual IntraPayload encode(const Frame& frame, int qp) const = 0;
    virtual Frame decode(std::span<const std::uint8_t> payload) const = 0;
    /// Pixels decode(encode(frame, qp)) would produce; codecs may skip entropy coding here.
    virtual Frame encode_decode(const Frame& frame, int qp) const { return decode(encode(frame, qp)); }
};

/// 8x8 block DCT on full-range BT.601 YCbCr (4:4:4), frequency-weighted uniform
/// quantization, zigzag scan, DEFLATE.
///
/// Payload layout: [tag 0x01][width u16][height u16][qp u8][varint raw_len][DEFLATE(coefficients)],
/// where the raw coefficient stream is every block of Y, then Cb, then Cr in raster order, each as 64 zigzag
/// ordered signed LEB128 (zigzag-mapped) integers.
///
/// Encoding is idempotent: encode(decode(encode(F, qp)), qp) == encode(F, qp). The encoder
/// iterates quantize/reconstruct until the coefficients reproduce themselves.
class DctIntraCodec final : public IntraCodec {
public:
    IntraCodecTag tag() const override { return IntraCodecTag::ReferenceDct; }
    IntraPayload encode(const Frame& frame, int qp) const override;
    Frame decode(std::span<const std::uint8_t> payload) const override;

    Frame encode_decode(const Frame& frame, int qp) const override;
};

/// Codec for a tag read from a stream; throws dac::Error for tags this build cannot decode.
const IntraCodec& intra_codec_for(IntraCodecTag tag);

/// Convenience wrappers around the reference codec.
IntraPayload encode_intra(const Frame& frame, int qp);
Frame decode_intra(std::span<const std::uint8_t> payload);

}  // namespace dac
