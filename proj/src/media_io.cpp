#include "dac/media_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dac/error.hpp"

namespace dac {
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// BT.601 Y'CbCr <-> R'G'B'. Video range unless the stream declares full range.
struct YcbcrRange {
    double y_offset, y_scale, c_scale;
};
constexpr YcbcrRange kVideoRange{16.0, 219.0, 224.0};
constexpr YcbcrRange kFullRange{0.0, 255.0, 255.0};
constexpr double kKr = 0.299, kKb = 0.114, kKg = 1.0 - kKr - kKb;

void ycbcr_to_rgb(double y, double cb, double cr, const YcbcrRange& r, std::uint8_t* rgb) {
    double yn = (y - r.y_offset) / r.y_scale;
    double pb = (cb - 128.0) / r.c_scale;
    double pr = (cr - 128.0) / r.c_scale;
    double R = yn + 2.0 * (1.0 - kKr) * pr;
    double B = yn + 2.0 * (1.0 - kKb) * pb;
    double G = (yn - kKr * R - kKb * B) / kKg;
    rgb[0] = clamp_u8(R * 255.0);
    rgb[1] = clamp_u8(G * 255.0);
    rgb[2] = clamp_u8(B * 255.0);
}

void rgb_to_ycbcr(const std::uint8_t* rgb, const YcbcrRange& r, double& y, double& cb, double& cr) {
    double R = rgb[0] / 255.0, G = rgb[1] / 255.0, B = rgb[2] / 255.0;
    double yn = kKr * R + kKg * G + kKb * B;
    y = r.y_offset + r.y_scale * yn;
    cb = 128.0 + r.c_scale * (B - yn) / (2.0 * (1.0 - kKb));
    cr = 128.0 + r.c_scale * (R - yn) / (2.0 * (1.0 - kKr));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct Y4mHeader {
    int width = 0, height = 0;
    Rational fps{25, 1};
    bool chroma444 = false;
    bool full_range = false;
};

Y4mHeader parse_y4m_header(const std::string& line) {
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    if (token != "YUV4MPEG2") throw Error("malformed header: missing YUV4MPEG2 signature");
    Y4mHeader h;
    while (ss >> token) {
        char tag = token[0];
        std::string val = token.substr(1);
        switch (tag) {
        case 'W': h.width = std::atoi(val.c_str()); break;
        case 'H': h.height = std::atoi(val.c_str()); break;
        case 'F': {
            int n = 0, d = 0;
            if (std::sscanf(val.c_str(), "%d:%d", &n, &d) != 2 || n <= 0 || d <= 0)
                throw Error("malformed header: bad frame rate '" + val + "'");
            h.fps = {n, d};
            break;
        }
        case 'C':
            if (val == "444") h.chroma444 = true;
            else if (val == "420" || val == "420jpeg" || val == "420mpeg2" || val == "420paldv") h.chroma444 = false;
            else throw Error("unsupported y4m colorspace C" + val + " (need 4:2:0 or 4:4:4, 8-bit)");
            break;
        case 'X':
            if (val == "COLORRANGE=FULL") h.full_range = true;
            break;
        default: break;  // interlacing, aspect and unknown tags are ignored
        }
    }
    if (h.width <= 0 || h.height <= 0) throw Error("malformed header: missing or invalid W/H");
    return h;
}

}  // namespace

SequenceFormat detect_format(const fs::path& path) {
    return fs::is_directory(path) ? SequenceFormat::ImageDir : SequenceFormat::Y4m;
}

FrameSequence load_sequence(const fs::path& path, SequenceFormat format, Rational image_fps) {
    if (!fs::exists(path)) throw Error("input does not exist: " + path.string());
    return format == SequenceFormat::Y4m ? read_y4m(path) : read_image_dir(path, image_fps);
}

FrameSequence read_y4m(const fs::path& path) {
    const auto bytes = read_file(path);
    auto next_line = [&](std::size_t& pos) -> std::string {
        auto it = std::find(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), '\n');
        if (it == bytes.end()) throw TruncatedError("malformed header: unterminated line");
        std::string line(bytes.begin() + static_cast<std::ptrdiff_t>(pos), it);
        pos = static_cast<std::size_t>(it - bytes.begin()) + 1;
        return line;
    };

    std::size_t pos = 0;
    const Y4mHeader h = parse_y4m_header(next_line(pos));
    const YcbcrRange& range = h.full_range ? kFullRange : kVideoRange;
    const int cw = h.chroma444 ? h.width : (h.width + 1) / 2;
    const int ch = h.chroma444 ? h.height : (h.height + 1) / 2;
    const std::size_t luma_size = static_cast<std::size_t>(h.width) * h.height;
    const std::size_t chroma_size = static_cast<std::size_t>(cw) * ch;
    const std::size_t frame_size = luma_size + 2 * chroma_size;

    FrameSequence seq;
    seq.fps = h.fps;
    while (pos < bytes.size()) {
        std::string marker = next_line(pos);
        if (marker.rfind("FRAME", 0) != 0) throw Error("malformed frame marker");
        if (bytes.size() - pos < frame_size) throw TruncatedError("truncated frame payload");
        const std::uint8_t* yp = &bytes[pos];
        const std::uint8_t* up = yp + luma_size;
        const std::uint8_t* vp = up + chroma_size;
        Frame f(h.width, h.height);
        for (int y = 0; y < h.height; ++y) {
            for (int x = 0; x < h.width; ++x) {
                std::size_t ci = h.chroma444 ? static_cast<std::size_t>(y) * cw + x
                                             : static_cast<std::size_t>(y / 2) * cw + x / 2;
                ycbcr_to_rgb(yp[static_cast<std::size_t>(y) * h.width + x], up[ci], vp[ci], range,
                             f.pixel(x, y));
            }
        }
        seq.frames.push_back(std::move(f));
        pos += frame_size;
    }
    if (seq.empty()) throw Error("empty sequence");
    return seq;
}

void write_y4m(const FrameSequence& seq, const fs::path& path, Y4mChroma chroma) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    if (seq.empty()) throw Error("empty sequence");
    validate_sequence(seq);
    const int w = seq.frames[0].width(), h = seq.frames[0].height();
    const bool c444 = chroma == Y4mChroma::C444;
    out << "YUV4MPEG2 W" << w << " H" << h << " F" << seq.fps.num << ':' << seq.fps.den
        << " Ip A1:1 C" << (c444 ? "444" : "420jpeg") << '\n';

    const int cw = c444 ? w : (w + 1) / 2, chh = c444 ? h : (h + 1) / 2;
    std::vector<std::uint8_t> yplane(static_cast<std::size_t>(w) * h);
    std::vector<double> cb(static_cast<std::size_t>(w) * h), cr(cb.size());
    std::vector<std::uint8_t> uplane(static_cast<std::size_t>(cw) * chh), vplane(uplane.size());
    for (const Frame& f : seq.frames) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::size_t i = static_cast<std::size_t>(y) * w + x;
                double yy;
                rgb_to_ycbcr(f.pixel(x, y), kVideoRange, yy, cb[i], cr[i]);
                yplane[i] = clamp_u8(yy);
            }
        }
        for (int y = 0; y < chh; ++y) {
            for (int x = 0; x < cw; ++x) {
                double su = 0, sv = 0;
                int n = 0;
                int step = c444 ? 1 : 2;
                for (int dy = 0; dy < step; ++dy) {
                    for (int dx = 0; dx < step; ++dx) {
                        int sx = x * step + dx, sy = y * step + dy;
                        if (sx >= w || sy >= h) continue;
                        std::size_t i = static_cast<std::size_t>(sy) * w + sx;
                        su += cb[i];
                        sv += cr[i];
                        ++n;
                    }
                }
                std::size_t ci = static_cast<std::size_t>(y) * cw + x;
                uplane[ci] = clamp_u8(su / n);
                vplane[ci] = clamp_u8(sv / n);
            }
        }
        out << "FRAME\n";
        out.write(reinterpret_cast<const char*>(yplane.data()), static_cast<std::streamsize>(yplane.size()));
        out.write(reinterpret_cast<const char*>(uplane.data()), static_cast<std::streamsize>(uplane.size()));
        out.write(reinterpret_cast<const char*>(vplane.data()), static_cast<std::streamsize>(vplane.size()));
    }
    if (!out) throw Error("write failed: " + path.string());
}

Frame read_png(const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw Error("cannot read PNG " + path.string() + ": " + image.message);
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw Error("cannot decode PNG " + path.string() + ": " + msg);
    }
    return Frame(static_cast<int>(image.width), static_cast<int>(image.height), std::move(rgb));
}

void write_png(const Frame& frame, const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width());
    image.height = static_cast<png_uint_32>(frame.height());
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, frame.data().data(), 0, nullptr))
        throw Error("cannot write PNG " + path.string() + ": " + image.message);
}

Frame read_ppm(const fs::path& path) {
    const auto bytes = read_file(path);
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&] {
        skip_ws();
        int v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            any = true;
        }
        if (!any) throw Error("malformed header in " + path.string());
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6')
        throw Error("malformed header: not a binary PPM (P6): " + path.string());
    pos = 2;
    int w = read_int(), h = read_int(), maxval = read_int();
    if (maxval != 255) throw Error("unsupported PPM maxval " + std::to_string(maxval));
    ++pos;  // single whitespace before raster
    std::size_t n = static_cast<std::size_t>(w) * h * 3;
    if (w <= 0 || h <= 0) throw Error("malformed header in " + path.string());
    if (bytes.size() < pos + n) throw TruncatedError("truncated frame payload in " + path.string());
    return Frame(w, h, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + n)));
}

void write_ppm(const Frame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data().data()),
              static_cast<std::streamsize>(frame.data().size()));
    if (!out) throw Error("write failed: " + path.string());
}

FrameSequence read_image_dir(const fs::path& dir, Rational fps) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
    if (fps.num <= 0 || fps.den <= 0) throw Error("fps must be positive");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = lower(entry.path().extension().string());
        if (ext == ".png" || ext == ".ppm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    FrameSequence seq;
    seq.fps = fps;
    for (const auto& f : files) {
        Frame frame = lower(f.extension().string()) == ".png" ? read_png(f) : read_ppm(f);
        if (!seq.frames.empty() && !frame.same_size(seq.frames[0]))
            throw Error("inconsistent frame sizes: " + f.filename().string());
        seq.frames.push_back(std::move(frame));
    }
    if (seq.empty()) throw Error("empty sequence");
    return seq;
}

void write_image_dir(const FrameSequence& seq, const fs::path& dir, const std::string& extension) {
    fs::create_directories(dir);
    const bool png = lower(extension) == ".png";
    if (!png && lower(extension) != ".ppm") throw Error("unsupported image extension " + extension);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu", i);
        fs::path p = dir / (std::string(name) + (png ? ".png" : ".ppm"));
        png ? write_png(seq.frames[i], p) : write_ppm(seq.frames[i], p);
    }
}

Frame resize_bilinear(const Frame& frame, int width, int height) {
    if (width <= 0 || height <= 0) throw Error("resize target must be positive");
    if (width == frame.width() && height == frame.height()) return frame;
    Frame out(width, height);
    const double sx = static_cast<double>(frame.width()) / width;
    const double sy = static_cast<double>(frame.height()) / height;
    for (int y = 0; y < height; ++y) {
        double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, frame.height() - 1.0);
        int y0 = static_cast<int>(fy);
        int y1 = std::min(y0 + 1, frame.height() - 1);
        double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, frame.width() - 1.0);
            int x0 = static_cast<int>(fx);
            int x1 = std::min(x0 + 1, frame.width() - 1);
            double wx = fx - x0;
            for (int c = 0; c < Frame::kChannels; ++c) {
                double top = frame.at(x0, y0, c) * (1.0 - wx) + frame.at(x1, y0, c) * wx;
                double bot = frame.at(x0, y1, c) * (1.0 - wx) + frame.at(x1, y1, c) * wx;
                out.at(x, y, c) = clamp_u8(top * (1.0 - wy) + bot * wy);
            }
        }
    }
    return out;
}

Frame preprocess(const Frame& frame, int target_width, int target_height) {
    if (frame.width() == target_width && frame.height() == target_height) return frame;
    const long long w = frame.width(), h = frame.height();
    long long cw = w, ch = h;
    if (w * target_height > h * target_width) cw = std::max(1LL, h * target_width / target_height);
    else ch = std::max(1LL, w * target_height / target_width);
    const int x0 = static_cast<int>((w - cw) / 2), y0 = static_cast<int>((h - ch) / 2);

    Frame crop(static_cast<int>(cw), static_cast<int>(ch));
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            for (int c = 0; c < Frame::kChannels; ++c) crop.at(x, y, c) = frame.at(x0 + x, y0 + y, c);
    return resize_bilinear(crop, target_width, target_height);
}

}  // namespace dac
