#include "dac/deflate.hpp"

#include <zlib.h>

#include "dac/error.hpp"

namespace dac {

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data, int level) {
    z_stream zs{};
    if (deflateInit2(&zs, level, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error("deflateInit2 failed");
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("deflate failed");
    out.resize(zs.total_out);
    return out;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> data, std::size_t expected_size) {
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) throw Error("inflateInit2 failed");
    // One spare byte so an over-long stream is detected rather than silently cut.
    std::vector<std::uint8_t> out(expected_size + 1);
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    bool consumed_all = zs.avail_in == 0;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("corrupt DEFLATE stream");
    if (produced != expected_size) throw Error("DEFLATE stream length mismatch");
    if (!consumed_all) throw Error("trailing bytes after DEFLATE stream");
    out.resize(produced);
    return out;
}

}  // namespace dac
