#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "dac/frame.hpp"

namespace dac {

inline constexpr double kJacobianEpsilon = 1e-3;  // added to the moment matrix before normalization
inline constexpr double kJacobianDetFloor = 1e-4;  // smallest |det| accepted for a keypoint Jacobian

/// Position in normalized frame coordinates ([-1, 1], pixel centers at the ends) plus a
/// symmetric 2x2 Jacobian [[a, b], [b, d]].
struct Keypoint {
    double x = 0, y = 0;
    double a = 1, b = 0, d = 1;

    double det() const { return a * d - b * b; }
    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct KeypointSet {
    std::vector<Keypoint> points;

    std::size_t size() const { return points.size(); }
    const Keypoint& operator[](std::size_t i) const { return points[i]; }
    Keypoint& operator[](std::size_t i) { return points[i]; }
    friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

/// If |det J| is below the floor, adds epsilon * I; falls back to identity if that is not enough.
/// Returns true when the Jacobian was changed.
bool regularize_jacobian(Keypoint& kp);

struct MotionParams {
    int num_keypoints = 9;
    double sigma_heat = 2.0;  // saliency blur, pixels
    double sigma_w = 0.1;     // keypoint influence radius, normalized units
    double beta = 1.0;        // background (identity) component strength
};

/// Cell layout used by the keypoint detector: cols x rows == num_keypoints, cols >= rows,
/// as square as the factorization of M allows.
struct CellGrid {
    int cols = 1, rows = 1;
    static CellGrid for_count(int num_keypoints);
    /// Pixel boundaries [b0, b1, ..., bn] of n cells over `extent` pixels, mirror-symmetric.
    static std::vector<int> boundaries(int n, int extent);
};

/// Backward flow: for every target pixel, the normalized source location to sample.
struct FlowField {
    struct Vec {
        double x = 0, y = 0;
    };
    int width = 0, height = 0;
    std::vector<Vec> v;

    const Vec& at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

/// Normalized coordinate of pixel index i along an axis with `extent` pixels.
inline double to_normalized(double i, int extent) {
    return extent > 1 ? 2.0 * i / (extent - 1) - 1.0 : 0.0;
}
inline double to_pixel(double u, int extent) {
    return extent > 1 ? (u + 1.0) * (extent - 1) / 2.0 : 0.0;
}

/// Blurred luma gradient magnitude, the detector's confidence map.
std::vector<double> saliency_map(const Frame& frame, double sigma_heat);

KeypointSet extract_keypoints(const Frame& frame, const MotionParams& params = {});

/// First-order dense motion: per keypoint local affine maps blended by Gaussian proximity weights
/// to the driving keypoints, plus an identity background component.
/// Throws dac::Error naming the keypoint if a driving Jacobian is below the determinant floor.
FlowField dense_motion(const KeypointSet& src_kp, const KeypointSet& drv_kp, int width, int height,
                       const MotionParams& params = {});

/// Blend weights at a normalized location; index 0 is the background, k+1 is keypoint k.
std::vector<double> motion_weights(const KeypointSet& drv_kp, double x, double y, const MotionParams& params);

/// Backward bilinear warp with edge clamping, rounded to nearest.
Frame warp(const Frame& src, const FlowField& flow);

Frame reconstruct(const Frame& src, const KeypointSet& src_kp, const KeypointSet& drv_kp,
                  const MotionParams& params = {});

/// Extraction and reconstruction backend. Encoder and decoder must use identical instances.
class MotionModel {
public:
    virtual ~MotionModel() = default;
    virtual KeypointSet extract(const Frame& frame) const = 0;
    virtual Frame reconstruct(const Frame& src, const KeypointSet& src_kp, const KeypointSet& drv_kp) const = 0;
    virtual int num_keypoints() const = 0;
};

class FirstOrderMotionModel final : public MotionModel {
public:
    explicit FirstOrderMotionModel(MotionParams params = {});

    KeypointSet extract(const Frame& frame) const override { return extract_keypoints(frame, params_); }
    Frame reconstruct(const Frame& src, const KeypointSet& src_kp, const KeypointSet& drv_kp) const override {
        return dac::reconstruct(src, src_kp, drv_kp, params_);
    }
    int num_keypoints() const override { return params_.num_keypoints; }
    const MotionParams& params() const { return params_; }

private:
    MotionParams params_;
};

// Keypoint CSV: header "frame_index,k,x,y,a,b,d", one row per keypoint.
using KeypointTrack = std::map<int, KeypointSet>;
void write_keypoints_csv(std::ostream& out, const KeypointTrack& track);
KeypointTrack read_keypoints_csv(std::istream& in);

}  // namespace dac
