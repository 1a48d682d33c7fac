#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dac::fixtures {

namespace {

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

double hash01(std::uint32_t seed, int x, int y) {
    std::uint32_t h = seed * 0x9E3779B1u ^ static_cast<std::uint32_t>(x) * 0x85EBCA77u ^
                      static_cast<std::uint32_t>(y) * 0xC2B2AE3Du;
    h ^= h >> 15;
    h *= 0x2C1B3C6Du;
    h ^= h >> 12;
    h *= 0x297A2D39u;
    h ^= h >> 15;
    return (h & 0xFFFFFF) / double(0xFFFFFF);
}

// Smooth value noise with cell size `cell`.
double value_noise(std::uint32_t seed, double x, double y, double cell) {
    const double fx = x / cell, fy = y / cell;
    const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
    double tx = fx - x0, ty = fy - y0;
    tx = tx * tx * (3 - 2 * tx);
    ty = ty * ty * (3 - 2 * ty);
    const double a = hash01(seed, x0, y0), b = hash01(seed, x0 + 1, y0);
    const double c = hash01(seed, x0, y0 + 1), d = hash01(seed, x0 + 1, y0 + 1);
    return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
}

double smoothstep_edge(double d, double width) { return 1.0 / (1.0 + std::exp(d / width)); }

double gauss2(double x, double y, double cx, double cy, double sx, double sy) {
    const double u = (x - cx) / sx, v = (y - cy) / sy;
    return std::exp(-0.5 * (u * u + v * v));
}

}  // namespace

Frame head_frame(int width, int height, const SceneParams& p) {
    Frame f(width, height);
    std::mt19937 rng(p.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double skin_r = 185 + 40 * U(rng), skin_g = 130 + 30 * U(rng), skin_b = 100 + 30 * U(rng);
    const double bg_r = 40 + 80 * U(rng), bg_g = 60 + 80 * U(rng), bg_b = 80 + 80 * U(rng);
    const double sx = width / 256.0, sy = height / 256.0;
    const double cx = width * 0.5 + p.dx, cy = height * 0.52 + p.dy;
    const double rx = 62 * sx, ry = 80 * sy;

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double t = y / double(height);
            double r = bg_r * (0.8 + 0.4 * t), g = bg_g * (0.8 + 0.4 * t), b = bg_b * (1.1 - 0.3 * t);
            if (p.textured_background) {
                const double n = value_noise(p.seed + 7, x, y, 24.0 * sx) - 0.5;
                r += 30 * n;
                g += 30 * n;
                b += 30 * n;
            }
            // Face in head-local coordinates.
            const double u = x - cx, v = y - cy;
            const double ell = std::sqrt((u * u) / (rx * rx) + (v * v) / (ry * ry));
            const double face = smoothstep_edge((ell - 1.0) * rx, 1.5);
            const double shade = 0.85 + 0.15 * std::cos(u / rx * 1.2);
            double fr = skin_r * shade, fg = skin_g * shade, fb = skin_b * shade;
            const double hair = smoothstep_edge(v + ry * 0.55, 3.0) * face;
            fr = fr * (1 - hair) + 45 * hair;
            fg = fg * (1 - hair) + 30 * hair;
            fb = fb * (1 - hair) + 25 * hair;
            const double eyes = gauss2(u, v, -22 * sx, -12 * sy, 7 * sx, 4.5 * sy) +
                                gauss2(u, v, 22 * sx, -12 * sy, 7 * sx, 4.5 * sy);
            const double brows = gauss2(u, v, -22 * sx, -26 * sy, 11 * sx, 2.5 * sy) +
                                 gauss2(u, v, 22 * sx, -26 * sy, 11 * sx, 2.5 * sy);
            const double mouth = gauss2(u, v, 0, 38 * sy, 18 * sx, (2.5 + 5.0 * p.mouth_open) * sy);
            const double nose = gauss2(u, v, 0, 12 * sy, 4 * sx, 10 * sy);
            const double dark = std::min(1.0, eyes * 0.9 + brows * 0.6 + mouth * 0.7 + nose * 0.2);
            fr *= 1 - dark;
            fg *= 1 - dark;
            fb *= 1 - dark;
            fr += 60 * mouth * (1 - p.mouth_open);
            r = r * (1 - face) + fr * face;
            g = g * (1 - face) + fg * face;
            b = b * (1 - face) + fb * face;
            f.set_rgb(x, y, to_u8(r), to_u8(g), to_u8(b));
        }
    }
    return f;
}

FrameSequence head_sequence(std::uint32_t seed, int n, int width, int height) {
    FrameSequence seq;
    seq.fps = {25, 1};
    for (int i = 0; i < n; ++i) {
        SceneParams p;
        p.seed = seed;
        const double t = i / 25.0;
        p.dx = 5.0 * std::sin(2 * std::numbers::pi * 0.4 * t + seed);
        p.dy = 3.0 * std::sin(2 * std::numbers::pi * 0.3 * t + 0.5 * seed);
        p.mouth_open = 0.5 + 0.5 * std::sin(2 * std::numbers::pi * 1.1 * t);
        seq.frames.push_back(head_frame(width, height, p));
    }
    return seq;
}

FrameSequence translating_texture(int n, int width, int height, double speed) {
    FrameSequence seq;
    seq.fps = {25, 1};
    for (int i = 0; i < n; ++i) {
        const double ox = speed * i, oy = 0.5 * speed * i;
        Frame f(width, height);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double r = 110, g = 100, b = 90;
                for (int cy = 0; cy < 3; ++cy) {
                    for (int cx = 0; cx < 3; ++cx) {
                        const double bx = (cx + 0.5) * width / 3.0 + ox - 2.0 * speed * n / 2;
                        const double by = (cy + 0.5) * height / 3.0 + oy - speed * n / 2;
                        const double env = gauss2(x, y, bx, by, 11.0, 9.0);
                        const double phase = (cx * 3 + cy) * 0.7;
                        const double wave = std::cos(0.25 * ((x - bx) + 0.6 * (y - by)) + phase);
                        r += env * (70 + 50 * wave);
                        g += env * (40 + 60 * wave);
                        b += env * (20 + 40 * wave);
                    }
                }
                f.set_rgb(x, y, to_u8(r), to_u8(g), to_u8(b));
            }
        }
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

Frame natural_frame(std::uint32_t seed, int width, int height) {
    SceneParams p;
    p.seed = seed;
    p.dx = 10.0 * (hash01(seed, 1, 2) - 0.5);
    p.dy = 10.0 * (hash01(seed, 3, 4) - 0.5);
    p.mouth_open = hash01(seed, 5, 6);
    Frame f = head_frame(width, height, p);
    // Fine detail on top of the smooth scene.
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double n = 16 * (value_noise(seed + 11, x, y, 3.0) - 0.5);
            for (int c = 0; c < 3; ++c) f.at(x, y, c) = to_u8(f.at(x, y, c) + n);
        }
    return f;
}

Frame noise_frame(std::uint32_t seed, int width, int height) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> d(0, 255);
    Frame f(width, height);
    for (auto& v : f.data()) v = static_cast<std::uint8_t>(d(rng));
    return f;
}

std::vector<FrameSequence> standard_sequences(int frames) {
    return {head_sequence(3, frames), head_sequence(8, frames), translating_texture(frames)};
}

}  // namespace dac::fixtures
