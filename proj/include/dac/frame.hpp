#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dac {

struct Rational {
    int num = 25;
    int den = 1;

    double value() const { return static_cast<double>(num) / den; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Interleaved 8-bit RGB raster, row-major.
class Frame {
public:
    static constexpr int kChannels = 3;

    Frame() = default;
    Frame(int width, int height, std::uint8_t fill = 0);
    Frame(int width, int height, std::vector<std::uint8_t> rgb);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> data() { return data_; }

    std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }

    const std::uint8_t* pixel(int x, int y) const { return &data_[index(x, y, 0)]; }
    std::uint8_t* pixel(int x, int y) { return &data_[index(x, y, 0)]; }

    void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    /// BT.601 luma (0.299 R + 0.587 G + 0.114 B), unrounded.
    std::vector<double> luma() const;

    bool same_size(const Frame& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

struct FrameSequence {
    std::vector<Frame> frames;
    Rational fps;

    std::size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
};

/// Throws dac::Error unless every frame shares the first frame's size and fps > 0.
void validate_sequence(const FrameSequence& seq);

}  // namespace dac
