#include "dac/intra_codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dac/byte_io.hpp"
#include "dac/deflate.hpp"
#include "dac/error.hpp"

namespace dac {

namespace {

constexpr int kBlock = 8;
constexpr int kFixedPointIterations = 16;

// JPEG Annex K tables, natural (row-major) order.
constexpr std::array<int, 64> kLumaWeights = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<int, 64> kChromaWeights = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

constexpr std::array<int, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,  12, 19, 26, 33, 40, 48,
    41, 34, 27, 20, 13, 6,  7,  14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23,
    30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

struct DctBasis {
    std::array<double, 64> c{};  // c[u * 8 + x]
    DctBasis() {
        for (int u = 0; u < kBlock; ++u) {
            const double scale = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
            for (int x = 0; x < kBlock; ++x)
                c[u * kBlock + x] = scale * std::cos((2 * x + 1) * u * std::numbers::pi / (2.0 * kBlock));
        }
    }
};
const DctBasis& basis() {
    static const DctBasis b;
    return b;
}

void fdct8x8(const double* in, double* out) {
    const auto& c = basis().c;
    double tmp[64];
    for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
            double s = 0;
            for (int x = 0; x < 8; ++x) s += c[u * 8 + x] * in[y * 8 + x];
            tmp[y * 8 + u] = s;
        }
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0;
            for (int y = 0; y < 8; ++y) s += c[v * 8 + y] * tmp[y * 8 + u];
            out[v * 8 + u] = s;
        }
}

void idct8x8(const double* in, double* out) {
    const auto& c = basis().c;
    double tmp[64];
    for (int v = 0; v < 8; ++v)
        for (int x = 0; x < 8; ++x) {
            double s = 0;
            for (int u = 0; u < 8; ++u) s += c[u * 8 + x] * in[v * 8 + u];
            tmp[v * 8 + x] = s;
        }
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double s = 0;
            for (int v = 0; v < 8; ++v) s += c[v * 8 + y] * tmp[v * 8 + x];
            out[y * 8 + x] = s;
        }
}

struct Layout {
    int width, height, padded_w, padded_h;
    int blocks_x() const { return padded_w / kBlock; }
    int blocks_y() const { return padded_h / kBlock; }
    std::size_t coeffs_per_plane() const { return static_cast<std::size_t>(padded_w) * padded_h; }
};

Layout layout_for(int w, int h) {
    return {w, h, (w + kBlock - 1) / kBlock * kBlock, (h + kBlock - 1) / kBlock * kBlock};
}

using Coefficients = std::vector<int>;  // 3 planes x blocks x 64, zigzag order inside each block

std::array<double, 64> step_table(int qp, bool chroma) {
    const auto& w = chroma ? kChromaWeights : kLumaWeights;
    std::array<double, 64> s{};
    const double q = qp_step(qp);
    for (int i = 0; i < 64; ++i) s[i] = q * w[i] / 16.0;
    return s;
}

// Level-shifted full-range YCbCr planes, padded by edge replication.
std::array<std::vector<double>, 3> to_planes(const Frame& f, const Layout& L) {
    std::array<std::vector<double>, 3> p;
    for (auto& v : p) v.resize(L.coeffs_per_plane());
    for (int y = 0; y < L.padded_h; ++y) {
        const int sy = std::min(y, L.height - 1);
        for (int x = 0; x < L.padded_w; ++x) {
            const int sx = std::min(x, L.width - 1);
            const double R = f.at(sx, sy, 0), G = f.at(sx, sy, 1), B = f.at(sx, sy, 2);
            const double Y = 0.299 * R + 0.587 * G + 0.114 * B;
            const std::size_t i = static_cast<std::size_t>(y) * L.padded_w + x;
            p[0][i] = Y - 128.0;
            p[1][i] = (B - Y) / 1.772;
            p[2][i] = (R - Y) / 1.402;
        }
    }
    return p;
}

Coefficients quantize(const Frame& f, const Layout& L, int qp) {
    const auto planes = to_planes(f, L);
    Coefficients q;
    q.reserve(3 * L.coeffs_per_plane());
    double block[64], coef[64];
    for (int p = 0; p < 3; ++p) {
        const auto steps = step_table(qp, p > 0);
        for (int by = 0; by < L.blocks_y(); ++by)
            for (int bx = 0; bx < L.blocks_x(); ++bx) {
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x)
                        block[y * 8 + x] = planes[p][static_cast<std::size_t>(by * 8 + y) * L.padded_w + bx * 8 + x];
                fdct8x8(block, coef);
                for (int i = 0; i < 64; ++i) {
                    const int n = kZigzag[i];
                    const double r = coef[n] / steps[n];
                    q.push_back(static_cast<int>(r < 0 ? -std::floor(-r + 0.5) : std::floor(r + 0.5)));
                }
            }
    }
    return q;
}

std::uint8_t round_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

Frame reconstruct(const Coefficients& q, const Layout& L, int qp) {
    std::array<std::vector<double>, 3> planes;
    double coef[64], block[64];
    std::size_t k = 0;
    for (int p = 0; p < 3; ++p) {
        planes[p].resize(L.coeffs_per_plane());
        const auto steps = step_table(qp, p > 0);
        for (int by = 0; by < L.blocks_y(); ++by)
            for (int bx = 0; bx < L.blocks_x(); ++bx) {
                for (int i = 0; i < 64; ++i) {
                    const int n = kZigzag[i];
                    coef[n] = q[k++] * steps[n];
                }
                idct8x8(coef, block);
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x)
                        planes[p][static_cast<std::size_t>(by * 8 + y) * L.padded_w + bx * 8 + x] = block[y * 8 + x];
            }
    }
    Frame f(L.width, L.height);
    for (int y = 0; y < L.height; ++y)
        for (int x = 0; x < L.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * L.padded_w + x;
            const double Y = planes[0][i] + 128.0, cb = planes[1][i], cr = planes[2][i];
            const double R = Y + 1.402 * cr;
            const double B = Y + 1.772 * cb;
            const double G = (Y - 0.299 * R - 0.114 * B) / 0.587;
            f.set_rgb(x, y, round_u8(R), round_u8(G), round_u8(B));
        }
    return f;
}

// Quantize, then re-quantize the reconstruction until the coefficients are a fixed point.
Coefficients stable_coefficients(const Frame& frame, const Layout& L, int qp) {
    Coefficients q = quantize(frame, L, qp);
    for (int it = 0; it < kFixedPointIterations; ++it) {
        Coefficients next = quantize(reconstruct(q, L, qp), L, qp);
        if (next == q) break;
        q = std::move(next);
    }
    return q;
}

}  // namespace

void check_qp(int qp) {
    if (qp < kMinQp || qp > kMaxQp) throw std::invalid_argument("QP out of range: " + std::to_string(qp));
}

double qp_step(int qp) { return std::pow(2.0, (qp - 4) / 6.0); }

IntraPayload DctIntraCodec::encode(const Frame& frame, int qp) const {
    check_qp(qp);
    if (frame.width() > 0xFFFF || frame.height() > 0xFFFF) throw Error("frame too large for intra payload");
    const Layout L = layout_for(frame.width(), frame.height());
    const Coefficients q = stable_coefficients(frame, L, qp);

    std::vector<std::uint8_t> raw;
    raw.reserve(q.size());
    ByteWriter rw(raw);
    for (int v : q) rw.varint(static_cast<std::uint32_t>((v << 1) ^ (v >> 31)));

    IntraPayload out;
    ByteWriter w(out);
    w.u8(static_cast<std::uint8_t>(IntraCodecTag::ReferenceDct));
    w.u16(static_cast<std::uint16_t>(frame.width()));
    w.u16(static_cast<std::uint16_t>(frame.height()));
    w.u8(static_cast<std::uint8_t>(qp));
    w.varint(raw.size());
    w.bytes(deflate_raw(raw));
    return out;
}

Frame DctIntraCodec::decode(std::span<const std::uint8_t> payload) const {
    try {
        ByteReader r(payload);
        if (r.u8() != static_cast<std::uint8_t>(IntraCodecTag::ReferenceDct)) throw Error("not a reference DCT payload");
        const int w = r.u16(), h = r.u16(), qp = r.u8();
        if (w == 0 || h == 0) throw Error("zero frame dimension");
        if (qp > kMaxQp) throw Error("QP out of range");
        const std::uint64_t raw_len = r.varint();
        const Layout L = layout_for(w, h);
        const std::size_t count = 3 * L.coeffs_per_plane();
        // Each coefficient takes 1..5 varint bytes.
        if (raw_len < count || raw_len > 5 * count) throw Error("coefficient stream length mismatch");
        const auto raw = inflate_raw(r.bytes(r.remaining()), static_cast<std::size_t>(raw_len));

        ByteReader cr(raw);
        Coefficients q(count);
        for (auto& v : q) {
            const std::uint64_t m = cr.varint();
            if (m > 0xFFFFFFFFull) throw Error("coefficient out of range");
            const auto u = static_cast<std::uint32_t>(m);
            v = static_cast<int>(u >> 1) ^ -static_cast<int>(u & 1);
        }
        if (!cr.at_end()) throw Error("trailing coefficient data");
        return reconstruct(q, L, qp);
    } catch (const TruncatedError&) {
        throw Error("corrupt intra payload: truncated");
    } catch (const Error& e) {
        throw Error(std::string("corrupt intra payload: ") + e.what());
    }
}

Frame DctIntraCodec::encode_decode(const Frame& frame, int qp) const {
    check_qp(qp);
    const Layout L = layout_for(frame.width(), frame.height());
    return reconstruct(stable_coefficients(frame, L, qp), L, qp);
}

const IntraCodec& intra_codec_for(IntraCodecTag tag) {
    static const DctIntraCodec reference;
    if (tag == IntraCodecTag::ReferenceDct) return reference;
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02X", static_cast<unsigned>(tag));
    throw Error(std::string("unsupported intra codec tag ") + buf);
}

IntraPayload encode_intra(const Frame& frame, int qp) {
    return intra_codec_for(IntraCodecTag::ReferenceDct).encode(frame, qp);
}

Frame decode_intra(std::span<const std::uint8_t> payload) {
    if (payload.empty()) throw Error("corrupt intra payload: empty");
    return intra_codec_for(static_cast<IntraCodecTag>(payload[0])).decode(payload);
}

}  // namespace dac
