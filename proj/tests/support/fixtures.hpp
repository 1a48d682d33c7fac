#pragma once

// Deterministic synthetic test content. Scenes are analytic so motion is exact at
// sub-pixel offsets.

#include <cstdint>
#include <vector>

#include "dac/frame.hpp"

namespace dac::fixtures {

struct SceneParams {
    std::uint32_t seed = 1;
    double dx = 0, dy = 0;       // head translation, pixels
    double mouth_open = 0.0;     // 0..1
    bool textured_background = true;
};

/// Talking-head-like still: shaded background, soft elliptical face, eyes, mouth, hair and
/// mild smooth texture.
Frame head_frame(int width, int height, const SceneParams& p);

/// `n` frames of a head drifting along a smooth path while the mouth opens and closes.
FrameSequence head_sequence(std::uint32_t seed, int n, int width = 256, int height = 256);

/// Gabor-like blobs (one per 3x3 cell) on a flat background, all translating together.
FrameSequence translating_texture(int n, int width = 256, int height = 256, double speed = 0.6);

/// Frame with smooth value noise and gradients, for still-codec checks.
Frame natural_frame(std::uint32_t seed, int width = 256, int height = 256);

/// Uniform random bytes.
Frame noise_frame(std::uint32_t seed, int width, int height);

/// The three 25-frame 256x256 sequences the acceptance suite runs on.
std::vector<FrameSequence> standard_sequences(int frames = 25);

}  // namespace dac::fixtures
