#pragma once

#include <filesystem>
#include <string>

#include "dac/frame.hpp"

namespace dac {

enum class SequenceFormat { Y4m, ImageDir };

enum class Y4mChroma { C420, C444 };

/// Picks ImageDir for directories, Y4m otherwise.
SequenceFormat detect_format(const std::filesystem::path& path);

/// Reads a Y4M file (4:2:0 or 4:4:4, 8-bit) or a directory of PNG/PPM images in
/// lexicographic filename order. `image_fps` applies to image directories only.
FrameSequence load_sequence(const std::filesystem::path& path, SequenceFormat format,
                            Rational image_fps = {25, 1});

FrameSequence read_y4m(const std::filesystem::path& path);
FrameSequence read_image_dir(const std::filesystem::path& dir, Rational fps = {25, 1});

void write_y4m(const FrameSequence& seq, const std::filesystem::path& path,
               Y4mChroma chroma = Y4mChroma::C420);

/// Writes frame_00000.png, frame_00001.png, ... (or .ppm). Creates the directory.
void write_image_dir(const FrameSequence& seq, const std::filesystem::path& dir,
                     const std::string& extension = ".png");

Frame read_png(const std::filesystem::path& path);
void write_png(const Frame& frame, const std::filesystem::path& path);
Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const Frame& frame, const std::filesystem::path& path);

/// Center-crops to the largest region with the target aspect ratio, then bilinearly
/// resamples to the target size. Frames already at the target size are returned unchanged.
Frame preprocess(const Frame& frame, int target_width = 256, int target_height = 256);

/// Bilinear resample with pixel-center alignment and edge clamping.
Frame resize_bilinear(const Frame& frame, int width, int height);

}  // namespace dac
