#include "doctest.h"

#include <algorithm>
#include <cstring>
#include <random>

#include "dac/bitstream.hpp"
#include "dac/byte_io.hpp"
#include "dac/error.hpp"

using namespace dac;

namespace {

StreamHeader sample_header() {
    StreamHeader h;
    h.width = 256;
    h.height = 192;
    h.fps_num = 30000;
    h.fps_den = 1001;
    h.num_keypoints = 10;
    h.buffer_capacity = 5;
    h.sigma_heat = 2.5f;
    h.sigma_w = 0.125f;
    h.beta = 0.75f;
    h.qp0 = 37;
    h.tau = 33.5f;
    return h;
}

std::vector<std::uint8_t> random_bytes(std::mt19937& rng, std::size_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    return v;
}

// Random records whose Inter slots are always valid for the given capacity.
std::vector<Record> random_records(std::mt19937& rng, int capacity, int count) {
    std::vector<Record> out;
    int occupancy = 0;
    for (int i = 0; i < count; ++i) {
        const bool intra = occupancy == 0 || rng() % 3 == 0;
        const std::size_t len = rng() % 4 == 0 ? 200 + rng() % 300 : rng() % 40;
        if (intra) {
            out.push_back(IntraRecord{static_cast<std::uint8_t>(rng() % 52), random_bytes(rng, len)});
            occupancy = std::min(occupancy + 1, capacity);
        } else {
            out.push_back(InterRecord{static_cast<std::uint8_t>(rng() % occupancy), random_bytes(rng, len)});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("header byte layout") {
    const auto h = sample_header();
    std::vector<std::uint8_t> out;
    write_header(out, h);
    REQUIRE(out.size() == kStreamHeaderSize);
    CHECK(std::memcmp(out.data(), "DACv", 4) == 0);
    CHECK(out[4] == kStreamVersion);
    CHECK(out[5] == 0x00);  // width 256 little-endian
    CHECK(out[6] == 0x01);
    CHECK(out[7] == 192);
    CHECK(out[9] == (30000 & 0xFF));
    CHECK(out[10] == (30000 >> 8));
    CHECK(out[11] == (1001 & 0xFF));
    CHECK(out[13] == 10);
    CHECK(out[14] == 5);
    CHECK(out[15] == 0x01);
    float f;
    std::memcpy(&f, &out[16], 4);
    CHECK(f == 2.5f);
    std::memcpy(&f, &out[24], 4);
    CHECK(f == 0.75f);
    CHECK(out[28] == 37);
    std::memcpy(&f, &out[29], 4);
    CHECK(f == 33.5f);
    CHECK(parse_header(out) == h);
}

TEST_CASE("record framing") {
    std::vector<std::uint8_t> out;
    write_record(out, IntraRecord{30, std::vector<std::uint8_t>(200, 7)});
    CHECK(out.size() == 1 + 1 + 2 + 200);
    CHECK(out[0] == kIntraTag);
    CHECK(out[1] == 30);
    CHECK(out[2] == 0xC8);  // 200 = 0xC8 0x01 in LEB128
    CHECK(out[3] == 0x01);
    CHECK(record_size(IntraRecord{30, std::vector<std::uint8_t>(200, 7)}) == out.size());
    out.clear();
    write_record(out, InterRecord{3, {1, 2, 3}});
    CHECK(out == std::vector<std::uint8_t>{kInterTag, 3, 3, 1, 2, 3});
}

TEST_CASE("stream round trip") {
    const auto h = sample_header();
    const std::vector<Record> recs = {IntraRecord{30, {1, 2, 3}}, InterRecord{0, {9, 9}}, IntraRecord{28, {}},
                                      InterRecord{1, {4}}};
    const auto bytes = write_stream(h, recs);
    const auto parsed = read_stream(bytes);
    CHECK(parsed.header == h);
    CHECK(parsed.records == recs);
}

TEST_CASE("parse then serialize is a bijection on random valid streams") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        auto h = sample_header();
        h.buffer_capacity = static_cast<std::uint8_t>(1 + rng() % 6);
        const auto recs = random_records(rng, h.buffer_capacity, static_cast<int>(rng() % 30));
        const auto bytes = write_stream(h, recs);
        const auto parsed = read_stream(bytes);
        REQUIRE(parsed.records == recs);
        REQUIRE(write_stream(parsed.header, parsed.records) == bytes);
    }
}

TEST_CASE("empty stream is a header alone") {
    const auto bytes = write_stream(sample_header(), {});
    CHECK(bytes.size() == kStreamHeaderSize);
    CHECK(read_stream(bytes).records.empty());
}

TEST_CASE("slot validation") {
    auto h = sample_header();
    const std::vector<Record> bad_slot = {IntraRecord{30, {1}}, InterRecord{7, {}}};
    CHECK_THROWS_WITH_AS(read_stream(write_stream(h, bad_slot)), "slot out of range: 7", Error);
    const std::vector<Record> inter_first = {InterRecord{0, {}}};
    CHECK_THROWS_AS(read_stream(write_stream(h, inter_first)), Error);
    const std::vector<Record> unoccupied = {IntraRecord{30, {1}}, IntraRecord{30, {1}}, InterRecord{2, {}}};
    CHECK_THROWS_WITH_AS(read_stream(write_stream(h, unoccupied)), "slot out of range: 2", Error);
    // Capacity bounds occupancy.
    h.buffer_capacity = 2;
    const std::vector<Record> full = {IntraRecord{30, {1}}, IntraRecord{30, {1}}, IntraRecord{30, {1}},
                                      InterRecord{1, {}}, InterRecord{2, {}}};
    StreamReader r(write_stream(h, full));
    for (int i = 0; i < 4; ++i) REQUIRE(r.next().has_value());
    CHECK(r.buffer_occupancy() == 2);
    CHECK_THROWS_AS(r.next(), Error);
}

TEST_CASE("header validation") {
    auto bytes = write_stream(sample_header(), {});
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_WITH_AS(read_stream(bad_magic), "bad magic", Error);
    auto bad_version = bytes;
    bad_version[4] = 9;
    CHECK_THROWS_WITH_AS(read_stream(bad_version), "version mismatch: 9", Error);
    auto zero_cap = bytes;
    zero_cap[14] = 0;
    CHECK_THROWS_AS(read_stream(zero_cap), Error);
    std::vector<std::uint8_t> short_header(bytes.begin(), bytes.begin() + 20);
    CHECK_THROWS_AS(read_stream(short_header), TruncatedError);
}

TEST_CASE("truncated records and the valid prefix") {
    const std::vector<Record> recs = {IntraRecord{30, std::vector<std::uint8_t>(300, 1)}, InterRecord{0, {5, 6, 7}},
                                      InterRecord{0, std::vector<std::uint8_t>(50, 2)}};
    const auto bytes = write_stream(sample_header(), recs);
    std::size_t boundary = kStreamHeaderSize;
    std::vector<std::size_t> ends;
    for (const auto& r : recs) ends.push_back(boundary += record_size(r));
    for (std::size_t cut = kStreamHeaderSize; cut < bytes.size(); ++cut) {
        StreamReader reader(std::span<const std::uint8_t>(bytes).first(cut));
        std::size_t complete = 0;
        bool threw = false;
        try {
            while (reader.next()) ++complete;
        } catch (const TruncatedError& e) {
            threw = true;
            CHECK(std::string(e.what()) == "truncated record");
        }
        const auto expected = static_cast<std::size_t>(std::count_if(ends.begin(), ends.end(), [&](std::size_t e) { return e <= cut; }));
        REQUIRE(complete == expected);
        const bool on_boundary = cut == kStreamHeaderSize || std::find(ends.begin(), ends.end(), cut) != ends.end();
        REQUIRE(threw == !on_boundary);
        REQUIRE(reader.position() == (expected ? ends[expected - 1] : kStreamHeaderSize));
    }
    auto unknown = bytes;
    unknown[kStreamHeaderSize] = 9;
    CHECK_THROWS_AS(read_stream(unknown), Error);
}

TEST_CASE("rate measurement") {
    CHECK(measure_rate_bytes(1000, 25.0, 25) == doctest::Approx(8.0));
    CHECK(measure_rate_bytes(0, 25.0, 10) == 0.0);
    CHECK(measure_rate_bytes(125, 30.0, 1) == doctest::Approx(30.0));
    const std::vector<Record> recs = {IntraRecord{30, std::vector<std::uint8_t>(96, 0)}, InterRecord{0, {1, 2}}};
    // (1 + 1 + 1 + 96) + (1 + 1 + 1 + 2) = 104 bytes over 2 frames at 25 fps
    CHECK(measure_rate(recs, 25.0, 2) == doctest::Approx(104 * 8 * 25.0 / 2 / 1000));
    CHECK_THROWS_AS(measure_rate(recs, 25.0, 0), std::invalid_argument);
}

TEST_CASE("varint and byte reader primitives") {
    std::vector<std::uint8_t> buf;
    ByteWriter w(buf);
    for (std::uint64_t v : {0ull, 1ull, 127ull, 128ull, 300ull, 0xFFFFFFFFull, ~0ull}) w.varint(v);
    ByteReader r(buf);
    for (std::uint64_t v : {0ull, 1ull, 127ull, 128ull, 300ull, 0xFFFFFFFFull, ~0ull}) CHECK(r.varint() == v);
    CHECK(r.at_end());
    CHECK_THROWS_AS(r.u8(), TruncatedError);
}
