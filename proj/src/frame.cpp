#include "dac/frame.hpp"

#include <string>

#include "dac/error.hpp"

namespace dac {

Frame::Frame(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * height * kChannels, fill) {
    if (width <= 0 || height <= 0) throw Error("frame dimensions must be positive");
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
    if (width <= 0 || height <= 0) throw Error("frame dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * height * kChannels)
        throw Error("frame data length does not match " + std::to_string(width) + "x" +
                    std::to_string(height) + "x3");
}

void Frame::set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto i = index(x, y, 0);
    data_[i] = r;
    data_[i + 1] = g;
    data_[i + 2] = b;
}

std::vector<double> Frame::luma() const {
    std::vector<double> y(pixel_count());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::uint8_t* p = &data_[i * kChannels];
        y[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return y;
}

void validate_sequence(const FrameSequence& seq) {
    if (seq.fps.num <= 0 || seq.fps.den <= 0) throw Error("fps must be positive");
    for (std::size_t i = 1; i < seq.frames.size(); ++i) {
        if (!seq.frames[i].same_size(seq.frames[0]))
            throw Error("inconsistent frame sizes: frame " + std::to_string(i));
    }
}

}  // namespace dac
