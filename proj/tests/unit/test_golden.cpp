#include "doctest.h"

#include <cstdlib>
#include <filesystem>

#include "dac/bitstream.hpp"
#include "dac/decoder.hpp"
#include "dac/encoder.hpp"
#include "fixtures.hpp"

using namespace dac;

// A checked-in stream pins the wire format and the encoder's decisions. Regenerate with
// DAC_UPDATE_GOLDEN=1 only when a format or algorithm change is intended.

namespace {

const std::filesystem::path kGolden = std::filesystem::path(DAC_DATA_DIR) / "head_48x48_6f.dac";

EncodeResult golden_encode() {
    EncoderConfig cfg;
    cfg.qp0 = 34;
    cfg.tau = 33;
    cfg.buffer_capacity = 3;
    return encode_sequence(fixtures::head_sequence(9, 6, 48, 48), cfg);
}

}  // namespace

TEST_CASE("encoder output matches the golden stream") {
    const auto enc = golden_encode();
    if (std::getenv("DAC_UPDATE_GOLDEN")) write_binary_file(kGolden.string(), enc.bytes);
    const auto golden = read_binary_file(kGolden.string());
    CHECK(enc.bytes == golden);
    const auto parsed = read_stream(golden);
    CHECK(parsed.header.width == 48);
    CHECK(parsed.header.buffer_capacity == 3);
    CHECK(parsed.records.size() == 6);
}

TEST_CASE("golden stream decodes to the encoder reconstructions") {
    const auto enc = golden_encode();
    const auto dec = decode_sequence(read_binary_file(kGolden.string()));
    CHECK(dec.frames == enc.reconstructions);
}
