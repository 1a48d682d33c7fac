#include "dac/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "dac/error.hpp"

namespace dac {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr int kMsSsimMinSize = 161;

std::array<double, kWindow> window() {
    std::array<double, kWindow> k{};
    double sum = 0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        k[i] = std::exp(-d * d / (2 * kWindowSigma * kWindowSigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Gaussian filtering, 'valid' region only.
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h) {
    static const auto k = window();
    const int ow = w - kWindow + 1, oh = h - kWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h), out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0;
            for (int i = 0; i < kWindow; ++i) s += k[i] * img[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0;
            for (int i = 0; i < kWindow; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

struct SsimTerms {
    double ssim = 0;  // mean of l * cs
    double cs = 0;    // mean of contrast-structure term
};

SsimTerms ssim_terms(std::span<const double> a, std::span<const double> b, int w, int h) {
    if (w < kWindow || h < kWindow) throw std::invalid_argument("SSIM needs at least 11x11 pixels");
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> va(a.begin(), a.end()), vb(b.begin(), b.end()), aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu1 = filter_valid(va, w, h), mu2 = filter_valid(vb, w, h);
    const auto s11 = filter_valid(aa, w, h), s22 = filter_valid(bb, w, h), s12 = filter_valid(ab, w, h);
    SsimTerms t;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        const double m1 = mu1[i], m2 = mu2[i];
        const double v1 = s11[i] - m1 * m1, v2 = s22[i] - m2 * m2, c12 = s12[i] - m1 * m2;
        const double cs = (2 * c12 + kC2) / (v1 + v2 + kC2);
        const double l = (2 * m1 * m2 + kC1) / (m1 * m1 + m2 * m2 + kC1);
        t.cs += cs;
        t.ssim += l * cs;
    }
    t.cs /= static_cast<double>(mu1.size());
    t.ssim /= static_cast<double>(mu1.size());
    return t;
}

std::vector<double> downsample2(const std::vector<double>& img, int w, int h, int& ow, int& oh) {
    ow = (w + 1) / 2;
    oh = (h + 1) / 2;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        const int y0 = 2 * y, y1 = std::min(2 * y + 1, h - 1);
        for (int x = 0; x < ow; ++x) {
            const int x0 = 2 * x, x1 = std::min(2 * x + 1, w - 1);
            out[static_cast<std::size_t>(y) * ow + x] =
                0.25 * (img[static_cast<std::size_t>(y0) * w + x0] + img[static_cast<std::size_t>(y0) * w + x1] +
                        img[static_cast<std::size_t>(y1) * w + x0] + img[static_cast<std::size_t>(y1) * w + x1]);
        }
    }
    return out;
}

void require_same(const Frame& a, const Frame& b) {
    if (!a.same_size(b)) throw std::invalid_argument("metric inputs differ in size");
}

}  // namespace

double psnr_luma(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("PSNR inputs differ in size");
    double sse = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sse += d * d;
    }
    if (sse == 0) return kPsnrIdentical;
    const double mse = sse / static_cast<double>(a.size());
    return std::min(kPsnrIdentical, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double psnr(const Frame& a, const Frame& b) {
    require_same(a, b);
    return psnr_luma(a.luma(), b.luma());
}

double ssim_plane(std::span<const double> a, std::span<const double> b, int width, int height) {
    return ssim_terms(a, b, width, height).ssim;
}

double ms_ssim_plane(std::span<const double> a, std::span<const double> b, int width, int height) {
    if (std::min(width, height) < kMsSsimMinSize)
        throw std::invalid_argument("MS-SSIM needs min dimension >= 161");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    int w = width, h = height;
    double result = 1.0;
    for (std::size_t scale = 0; scale < kMsSsimWeights.size(); ++scale) {
        const auto t = ssim_terms(x, y, w, h);
        const bool last = scale + 1 == kMsSsimWeights.size();
        const double term = std::max(0.0, last ? t.ssim : t.cs);
        result *= std::pow(term, kMsSsimWeights[scale]);
        if (!last) {
            int nw, nh;
            x = downsample2(x, w, h, nw, nh);
            y = downsample2(y, w, h, nw, nh);
            w = nw;
            h = nh;
        }
    }
    return result;
}

double ssim(const Frame& a, const Frame& b) {
    require_same(a, b);
    return ssim_plane(a.luma(), b.luma(), a.width(), a.height());
}

double ms_ssim(const Frame& a, const Frame& b) {
    require_same(a, b);
    return ms_ssim_plane(a.luma(), b.luma(), a.width(), a.height());
}

Metric parse_metric(const std::string& name) {
    if (name == "psnr") return Metric::Psnr;
    if (name == "ssim") return Metric::Ssim;
    if (name == "ms_ssim" || name == "ms-ssim") return Metric::MsSsim;
    throw std::invalid_argument("unknown metric '" + name + "' (psnr, ssim, ms_ssim)");
}

std::string metric_name(Metric m) {
    switch (m) {
    case Metric::Psnr: return "psnr";
    case Metric::Ssim: return "ssim";
    case Metric::MsSsim: return "ms_ssim";
    }
    return "?";
}

double compute_metric(Metric m, const Frame& reference, const Frame& test) {
    switch (m) {
    case Metric::Psnr: return psnr(reference, test);
    case Metric::Ssim: return ssim(reference, test);
    case Metric::MsSsim: return ms_ssim(reference, test);
    }
    return 0;
}

double sequence_metric(Metric m, const FrameSequence& reference, const FrameSequence& test) {
    if (reference.size() != test.size() || reference.empty())
        throw Error("sequences differ in length or are empty");
    double sum = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) sum += compute_metric(m, reference.frames[i], test.frames[i]);
    return sum / static_cast<double>(reference.size());
}

}  // namespace dac
