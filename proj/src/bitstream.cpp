#include "dac/bitstream.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "dac/byte_io.hpp"
#include "dac/error.hpp"

namespace dac {

namespace {

std::size_t varint_size(std::uint64_t v) {
    std::size_t n = 1;
    while (v >= 0x80) {
        v >>= 7;
        ++n;
    }
    return n;
}

}  // namespace

void write_header(std::vector<std::uint8_t>& out, const StreamHeader& h) {
    ByteWriter w(out);
    for (char c : kStreamMagic) w.u8(static_cast<std::uint8_t>(c));
    w.u8(h.version);
    w.u16(h.width);
    w.u16(h.height);
    w.u16(h.fps_num);
    w.u16(h.fps_den);
    w.u8(h.num_keypoints);
    w.u8(h.buffer_capacity);
    w.u8(static_cast<std::uint8_t>(h.intra_codec));
    w.f32(h.sigma_heat);
    w.f32(h.sigma_w);
    w.f32(h.beta);
    w.u8(h.qp0);
    w.f32(h.tau);
}

StreamHeader parse_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kStreamHeaderSize) throw TruncatedError("truncated stream header");
    ByteReader r(bytes);
    for (char c : kStreamMagic)
        if (r.u8() != static_cast<std::uint8_t>(c)) throw Error("bad magic");
    StreamHeader h;
    h.version = r.u8();
    if (h.version != kStreamVersion) throw Error("version mismatch: " + std::to_string(h.version));
    h.width = r.u16();
    h.height = r.u16();
    h.fps_num = r.u16();
    h.fps_den = r.u16();
    h.num_keypoints = r.u8();
    h.buffer_capacity = r.u8();
    h.intra_codec = static_cast<IntraCodecTag>(r.u8());
    h.sigma_heat = r.f32();
    h.sigma_w = r.f32();
    h.beta = r.f32();
    h.qp0 = r.u8();
    h.tau = r.f32();
    if (h.width == 0 || h.height == 0) throw Error("invalid header: zero dimension");
    if (h.fps_num == 0 || h.fps_den == 0) throw Error("invalid header: zero fps");
    if (h.num_keypoints == 0) throw Error("invalid header: zero keypoints");
    if (h.buffer_capacity == 0) throw Error("invalid header: buffer_capacity must be >= 1");
    if (h.qp0 > kMaxQp) throw Error("invalid header: QP out of range");
    return h;
}

void write_record(std::vector<std::uint8_t>& out, const Record& record) {
    ByteWriter w(out);
    if (const auto* intra = std::get_if<IntraRecord>(&record)) {
        w.u8(kIntraTag);
        w.u8(intra->qp);
        w.varint(intra->payload.size());
        w.bytes(intra->payload);
    } else {
        const auto& inter = std::get<InterRecord>(record);
        w.u8(kInterTag);
        w.u8(inter.source_slot);
        w.varint(inter.keypoints.size());
        w.bytes(inter.keypoints);
    }
}

std::size_t record_size(const Record& record) {
    const std::size_t body = std::visit(
        [](const auto& r) {
            if constexpr (std::is_same_v<std::decay_t<decltype(r)>, IntraRecord>) return r.payload.size();
            else return r.keypoints.size();
        },
        record);
    return 2 + varint_size(body) + body;
}

std::vector<std::uint8_t> write_stream(const StreamHeader& header, std::span<const Record> records) {
    std::vector<std::uint8_t> out;
    write_header(out, header);
    for (const auto& r : records) write_record(out, r);
    return out;
}

StreamReader::StreamReader(std::span<const std::uint8_t> bytes)
    : bytes_(bytes), header_(parse_header(bytes)), pos_(kStreamHeaderSize) {}

std::optional<Record> StreamReader::next() {
    if (pos_ == bytes_.size()) return std::nullopt;
    ByteReader r(bytes_.subspan(pos_));
    Record rec;
    try {
        const std::uint8_t tag = r.u8();
        if (tag == kIntraTag) {
            IntraRecord intra;
            intra.qp = r.u8();
            if (intra.qp > kMaxQp) throw Error("intra record QP out of range");
            const auto len = r.varint();
            if (len > r.remaining()) throw TruncatedError("truncated record");
            auto payload = r.bytes(static_cast<std::size_t>(len));
            intra.payload.assign(payload.begin(), payload.end());
            rec = std::move(intra);
        } else if (tag == kInterTag) {
            InterRecord inter;
            inter.source_slot = r.u8();
            if (inter.source_slot >= header_.buffer_capacity || inter.source_slot >= occupancy_)
                throw Error("slot out of range: " + std::to_string(inter.source_slot));
            const auto len = r.varint();
            if (len > r.remaining()) throw TruncatedError("truncated record");
            auto kp = r.bytes(static_cast<std::size_t>(len));
            inter.keypoints.assign(kp.begin(), kp.end());
            rec = std::move(inter);
        } else {
            throw Error("unknown record tag " + std::to_string(tag));
        }
    } catch (const TruncatedError&) {
        throw TruncatedError("truncated record");
    }
    pos_ += r.position();
    if (std::holds_alternative<IntraRecord>(rec))
        occupancy_ = std::min<int>(occupancy_ + 1, header_.buffer_capacity);
    return rec;
}

ParsedStream read_stream(std::span<const std::uint8_t> bytes) {
    StreamReader reader(bytes);
    ParsedStream out{reader.header(), {}};
    while (auto rec = reader.next()) out.records.push_back(std::move(*rec));
    return out;
}

double measure_rate_bytes(std::size_t record_bytes, double fps, std::size_t frame_count) {
    if (frame_count == 0) throw std::invalid_argument("frame_count must be > 0");
    return static_cast<double>(record_bytes) * 8.0 * fps / static_cast<double>(frame_count) / 1000.0;
}

double measure_rate(std::span<const Record> records, double fps, std::size_t frame_count) {
    std::size_t total = 0;
    for (const auto& r : records) total += record_size(r);
    return measure_rate_bytes(total, fps, frame_count);
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path);
}

}  // namespace dac
