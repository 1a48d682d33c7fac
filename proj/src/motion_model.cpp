#include "dac/motion_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "dac/error.hpp"

namespace dac {

namespace {

// Background component acts like a keypoint sitting this many sigma_w away from every pixel.
constexpr double kBackgroundSigmas = 3.0;

std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable blur with edge clamping; symmetric kernel so mirrored inputs give mirrored outputs.
std::vector<double> blur(const std::vector<double>& img, int w, int h, double sigma) {
    if (sigma <= 0) return img;
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    std::vector<double> tmp(img.size()), out(img.size());
    for (int y = 0; y < h; ++y) {
        const double* row = &img[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * row[std::clamp(x + i, 0, w - 1)];
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    }
    return out;
}

// J_src * J_drv^-1 - I, written so identical Jacobians give exactly zero.
struct AffineDelta {
    double m00, m01, m10, m11;
};

AffineDelta affine_delta(const Keypoint& s, const Keypoint& d) {
    const double det = d.a * d.d - d.b * d.b;
    // J_drv^-1 = [[d, -b], [-b, a]] / det
    const double a00 = (s.a * d.d - s.b * d.b) / det;
    const double a01 = (s.b * d.a - s.a * d.b) / det;
    const double a10 = (s.b * d.d - s.d * d.b) / det;
    const double a11 = (s.d * d.a - s.b * d.b) / det;
    return {a00 - 1.0, a01, a10, a11 - 1.0};
}

std::uint8_t round_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

bool regularize_jacobian(Keypoint& kp) {
    if (std::abs(kp.det()) >= kJacobianDetFloor) return false;
    kp.a += kJacobianEpsilon;
    kp.d += kJacobianEpsilon;
    if (std::abs(kp.det()) < kJacobianDetFloor) {
        kp.a = 1;
        kp.b = 0;
        kp.d = 1;
    }
    return true;
}

CellGrid CellGrid::for_count(int num_keypoints) {
    if (num_keypoints < 1) throw Error("number of keypoints must be >= 1");
    int cols = num_keypoints;
    for (int c = 1; c <= num_keypoints; ++c) {
        if (num_keypoints % c == 0 && c * c >= num_keypoints) {
            cols = c;
            break;
        }
    }
    return {cols, num_keypoints / cols};
}

std::vector<int> CellGrid::boundaries(int n, int extent) {
    std::vector<int> b(n + 1);
    for (int i = 0; 2 * i <= n; ++i) {
        b[i] = static_cast<int>((2LL * i * extent + n) / (2LL * n));  // round half up
        b[n - i] = extent - b[i];
    }
    return b;
}

FirstOrderMotionModel::FirstOrderMotionModel(MotionParams params) : params_(params) {
    CellGrid::for_count(params_.num_keypoints);
    if (params_.sigma_heat < 0 || params_.sigma_w <= 0 || params_.beta < 0)
        throw Error("invalid motion parameters");
}

std::vector<double> saliency_map(const Frame& frame, double sigma_heat) {
    const int w = frame.width(), h = frame.height();
    const auto luma = frame.luma();
    std::vector<double> mag(luma.size());
    auto L = [&](int x, int y) {
        return luma[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = 0.5 * (L(x + 1, y) - L(x - 1, y));
            double gy = 0.5 * (L(x, y + 1) - L(x, y - 1));
            mag[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return blur(mag, w, h, sigma_heat);
}

KeypointSet extract_keypoints(const Frame& frame, const MotionParams& params) {
    const int w = frame.width(), h = frame.height();
    const CellGrid grid = CellGrid::for_count(params.num_keypoints);
    const auto xb = CellGrid::boundaries(grid.cols, w);
    const auto yb = CellGrid::boundaries(grid.rows, h);
    const auto sal = saliency_map(frame, params.sigma_heat);

    KeypointSet out;
    out.points.reserve(static_cast<std::size_t>(params.num_keypoints));
    for (int row = 0; row < grid.rows; ++row) {
        for (int col = 0; col < grid.cols; ++col) {
            const int x0 = xb[col], x1 = xb[col + 1], y0 = yb[row], y1 = yb[row + 1];
            Keypoint kp;
            double total = 0, mx = 0, my = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    double s = sal[static_cast<std::size_t>(y) * w + x];
                    total += s;
                    mx += s * to_normalized(x, w);
                    my += s * to_normalized(y, h);
                }
            }
            if (x1 <= x0 || y1 <= y0 || total <= 1e-9) {
                // No structure: cell centroid, identity Jacobian.
                kp.x = to_normalized(0.5 * (x0 + std::max(x0, x1 - 1)), w);
                kp.y = to_normalized(0.5 * (y0 + std::max(y0, y1 - 1)), h);
                out.points.push_back(kp);
                continue;
            }
            kp.x = mx / total;
            kp.y = my / total;
            double cxx = 0, cxy = 0, cyy = 0;
            for (int y = y0; y < y1; ++y) {
                const double dy = to_normalized(y, h) - kp.y;
                for (int x = x0; x < x1; ++x) {
                    const double p = sal[static_cast<std::size_t>(y) * w + x] / total;
                    const double dx = to_normalized(x, w) - kp.x;
                    cxx += p * dx * dx;
                    cxy += p * dx * dy;
                    cyy += p * dy * dy;
                }
            }
            cxx += kJacobianEpsilon;
            cyy += kJacobianEpsilon;
            const double scale = std::sqrt(cxx * cyy - cxy * cxy);
            kp.a = cxx / scale;
            kp.b = cxy / scale;
            kp.d = cyy / scale;
            regularize_jacobian(kp);
            out.points.push_back(kp);
        }
    }
    return out;
}

std::vector<double> motion_weights(const KeypointSet& drv_kp, double x, double y, const MotionParams& params) {
    const double inv2s2 = 1.0 / (2.0 * params.sigma_w * params.sigma_w);
    const double bg_dist = kBackgroundSigmas * params.sigma_w;
    std::vector<double> logit(drv_kp.size() + 1);
    logit[0] = params.beta > 0 ? std::log(params.beta) - bg_dist * bg_dist * inv2s2
                               : -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < drv_kp.size(); ++k) {
        const double dx = x - drv_kp[k].x, dy = y - drv_kp[k].y;
        logit[k + 1] = -(dx * dx + dy * dy) * inv2s2;
    }
    const double m = *std::max_element(logit.begin(), logit.end());
    double sum = 0;
    for (double& l : logit) {
        l = std::exp(l - m);
        sum += l;
    }
    for (double& l : logit) l /= sum;
    return logit;
}

FlowField dense_motion(const KeypointSet& src_kp, const KeypointSet& drv_kp, int width, int height,
                       const MotionParams& params) {
    if (src_kp.size() != drv_kp.size())
        throw Error("keypoint count mismatch: " + std::to_string(src_kp.size()) + " vs " +
                    std::to_string(drv_kp.size()));
    for (std::size_t k = 0; k < drv_kp.size(); ++k) {
        if (std::abs(drv_kp[k].det()) < kJacobianDetFloor)
            throw Error("singular driving Jacobian at keypoint " + std::to_string(k));
    }
    const std::size_t m = drv_kp.size();
    std::vector<AffineDelta> deltas(m);
    for (std::size_t k = 0; k < m; ++k) deltas[k] = affine_delta(src_kp[k], drv_kp[k]);

    FlowField flow{width, height, std::vector<FlowField::Vec>(static_cast<std::size_t>(width) * height)};
    for (int py = 0; py < height; ++py) {
        const double y = to_normalized(py, height);
        for (int px = 0; px < width; ++px) {
            const double x = to_normalized(px, width);
            const auto wts = motion_weights(drv_kp, x, y, params);
            // Displacement form: sum_k w_k (T_k(z) - z); the background term is identically zero.
            double ux = 0, uy = 0;
            for (std::size_t k = 0; k < m; ++k) {
                const double rx = x - drv_kp[k].x, ry = y - drv_kp[k].y;
                const double tx = (src_kp[k].x - drv_kp[k].x) + deltas[k].m00 * rx + deltas[k].m01 * ry;
                const double ty = (src_kp[k].y - drv_kp[k].y) + deltas[k].m10 * rx + deltas[k].m11 * ry;
                ux += wts[k + 1] * tx;
                uy += wts[k + 1] * ty;
            }
            flow.v[static_cast<std::size_t>(py) * width + px] = {x + ux, y + uy};
        }
    }
    return flow;
}

Frame warp(const Frame& src, const FlowField& flow) {
    if (flow.width != src.width() || flow.height != src.height()) throw Error("flow/frame size mismatch");
    const int w = src.width(), h = src.height();
    Frame out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto& f = flow.at(x, y);
            const double sx = std::clamp(to_pixel(f.x, w), 0.0, w - 1.0);
            const double sy = std::clamp(to_pixel(f.y, h), 0.0, h - 1.0);
            const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
            const double wx = sx - x0, wy = sy - y0;
            for (int c = 0; c < Frame::kChannels; ++c) {
                const double top = src.at(x0, y0, c) * (1.0 - wx) + src.at(x1, y0, c) * wx;
                const double bot = src.at(x0, y1, c) * (1.0 - wx) + src.at(x1, y1, c) * wx;
                out.at(x, y, c) = round_u8(top * (1.0 - wy) + bot * wy);
            }
        }
    }
    return out;
}

Frame reconstruct(const Frame& src, const KeypointSet& src_kp, const KeypointSet& drv_kp,
                  const MotionParams& params) {
    return warp(src, dense_motion(src_kp, drv_kp, src.width(), src.height(), params));
}

void write_keypoints_csv(std::ostream& out, const KeypointTrack& track) {
    out << "frame_index,k,x,y,a,b,d\n";
    out << std::setprecision(17);
    for (const auto& [frame, set] : track) {
        for (std::size_t k = 0; k < set.size(); ++k) {
            const auto& p = set[k];
            out << frame << ',' << k << ',' << p.x << ',' << p.y << ',' << p.a << ',' << p.b << ',' << p.d << '\n';
        }
    }
}

KeypointTrack read_keypoints_csv(std::istream& in) {
    KeypointTrack track;
    std::string line;
    if (!std::getline(in, line) || line.rfind("frame_index", 0) != 0) throw Error("keypoint CSV: missing header");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        int frame = 0;
        std::size_t k = 0;
        Keypoint p;
        char c1, c2, c3, c4, c5, c6;
        if (!(ss >> frame >> c1 >> k >> c2 >> p.x >> c3 >> p.y >> c4 >> p.a >> c5 >> p.b >> c6 >> p.d))
            throw Error("keypoint CSV: malformed line " + std::to_string(lineno));
        auto& set = track[frame];
        if (k != set.size()) throw Error("keypoint CSV: keypoints out of order at line " + std::to_string(lineno));
        set.points.push_back(p);
    }
    return track;
}

}  // namespace dac
