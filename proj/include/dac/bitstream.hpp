#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dac/frame.hpp"
#include "dac/intra_codec.hpp"

namespace dac {

inline constexpr std::array<char, 4> kStreamMagic = {'D', 'A', 'C', 'v'};
inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::size_t kStreamHeaderSize = 33;

/// Fixed 33-byte stream header, little-endian:
///   magic "DACv" | version u8 | width u16 | height u16 | fps_num u16 | fps_den u16 |
///   num_keypoints u8 | buffer_capacity u8 | intra_codec u8 |
///   sigma_heat f32 | sigma_w f32 | beta f32 | qp0 u8 | tau f32
struct StreamHeader {
    std::uint8_t version = kStreamVersion;
    std::uint16_t width = 0, height = 0;
    std::uint16_t fps_num = 25, fps_den = 1;
    std::uint8_t num_keypoints = 9;
    std::uint8_t buffer_capacity = 5;
    IntraCodecTag intra_codec = IntraCodecTag::ReferenceDct;
    float sigma_heat = 2.0f, sigma_w = 0.1f, beta = 1.0f;
    std::uint8_t qp0 = 32;
    float tau = 30.0f;

    friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

/// A new source frame. Its keypoints are re-estimated by the decoder, never sent.
struct IntraRecord {
    std::uint8_t qp = 0;
    std::vector<std::uint8_t> payload;
    friend bool operator==(const IntraRecord&, const IntraRecord&) = default;
};

/// Motion-only frame: reconstruct from buffer slot `source_slot` (0 = oldest).
struct InterRecord {
    std::uint8_t source_slot = 0;
    std::vector<std::uint8_t> keypoints;  // keypoint_coder stream
    friend bool operator==(const InterRecord&, const InterRecord&) = default;
};

/// Wire layout: tag u8 (0 Intra, 1 Inter), then
///   Intra: qp u8 | varint len | payload
///   Inter: source_slot u8 | varint len | keypoint bytes
using Record = std::variant<IntraRecord, InterRecord>;

inline constexpr std::uint8_t kIntraTag = 0;
inline constexpr std::uint8_t kInterTag = 1;

void write_header(std::vector<std::uint8_t>& out, const StreamHeader& header);
void write_record(std::vector<std::uint8_t>& out, const Record& record);
std::size_t record_size(const Record& record);

std::vector<std::uint8_t> write_stream(const StreamHeader& header, std::span<const Record> records);

/// Incremental reader. Validates the header on construction and each record as it is read,
/// including that Inter slots reference an occupied buffer position.
class StreamReader {
public:
    explicit StreamReader(std::span<const std::uint8_t> bytes);

    const StreamHeader& header() const { return header_; }

    /// Next record, or nullopt at a clean end of stream. A partial trailing record throws
    /// TruncatedError("truncated record") and leaves the reader positioned before it.
    std::optional<Record> next();

    /// Offset just past the last complete record.
    std::size_t position() const { return pos_; }
    int buffer_occupancy() const { return occupancy_; }

private:
    std::span<const std::uint8_t> bytes_;
    StreamHeader header_;
    std::size_t pos_ = 0;
    int occupancy_ = 0;
};

struct ParsedStream {
    StreamHeader header;
    std::vector<Record> records;
};

ParsedStream read_stream(std::span<const std::uint8_t> bytes);

StreamHeader parse_header(std::span<const std::uint8_t> bytes);

/// Bits of all records (framing included, stream header excluded) * fps / frame_count / 1000.
double measure_rate(std::span<const Record> records, double fps, std::size_t frame_count);
double measure_rate_bytes(std::size_t record_bytes, double fps, std::size_t frame_count);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace dac
