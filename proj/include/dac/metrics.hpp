#pragma once

#include <span>
#include <string>
#include <vector>

#include "dac/frame.hpp"

namespace dac {

/// Reported for bit-identical luma planes.
inline constexpr double kPsnrIdentical = 999.0;

/// 10 log10(255^2 / MSE) over BT.601 luma.
double psnr(const Frame& a, const Frame& b);
double psnr_luma(std::span<const double> a, std::span<const double> b);

/// Mean SSIM over the valid region, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, luma.
double ssim(const Frame& a, const Frame& b);

/// Five-scale MS-SSIM with the standard exponents. Needs min(width, height) >= 161.
/// Negative per-scale terms are clamped to zero before exponentiation.
double ms_ssim(const Frame& a, const Frame& b);

/// Luma-plane variants; `width` x `height` row-major.
double ssim_plane(std::span<const double> a, std::span<const double> b, int width, int height);
double ms_ssim_plane(std::span<const double> a, std::span<const double> b, int width, int height);

enum class Metric { Psnr, Ssim, MsSsim };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);
double compute_metric(Metric m, const Frame& reference, const Frame& test);

/// Mean of per-frame scores. PSNR averages per-frame dB values, capping identical frames at
/// the sentinel.
double sequence_metric(Metric m, const FrameSequence& reference, const FrameSequence& test);

}  // namespace dac
