#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dac/bitstream.hpp"
#include "dac/frame.hpp"
#include "dac/intra_codec.hpp"
#include "dac/motion_model.hpp"
#include "dac/source_buffer.hpp"

namespace dac {

struct EncoderConfig {
    int qp0 = 32;
    double tau = 30.0;  // PSNR threshold, dB
    int buffer_capacity = 5;
    int qp_min = 0;
    MotionParams motion;
    /// Anchor mode: every frame Intra at qp0, no threshold test or QP refinement.
    bool all_intra = false;

    /// Throws std::invalid_argument for out-of-range settings (tau must be > 0).
    void validate() const;
};

/// Motion parameters exactly as a decoder reads them from the header (binary32 fields).
MotionParams motion_params_from_header(const StreamHeader& header);

StreamHeader make_header(const EncoderConfig& cfg, int width, int height, Rational fps);

struct BestSource {
    int slot = 0;
    Frame reconstruction;
    double psnr_db = 0;
};

/// Reconstructs `target` from every buffer entry and keeps the highest PSNR; ties go to the
/// newest entry. Requires a non-empty buffer.
BestSource select_best_source(const SourceBuffer& buffer, const Frame& target, const KeypointSet& target_kp,
                              const MotionModel& model);

struct QpRefinement {
    int qp = 0;
    IntraPayload payload;
    Frame decoded;
    double psnr_db = 0;
    bool constraint_met = false;
};

/// Walks QP down from qp0 one step at a time until PSNR >= tau or qp_min is reached.
QpRefinement refine_intra_qp(const Frame& frame, double tau, int qp0, int qp_min,
                             const IntraCodec& codec = intra_codec_for(IntraCodecTag::ReferenceDct));

enum class FrameMode : std::uint8_t { Intra, Inter };

struct FrameStats {
    std::size_t index = 0;
    FrameMode mode = FrameMode::Intra;
    int slot = -1;  // Inter only
    int qp = -1;    // Intra only
    std::size_t bits = 0;  // record size including framing
    double psnr_db = 0;    // reconstruction vs original, luma
    bool constraint_unmet = false;
};

void write_stats_csv(std::ostream& out, const std::vector<FrameStats>& stats);

/// Sequential encoder state machine. Frame 0 must be pushed first; every later frame is
/// either signalled as motion against a buffered source or refreshed as a new Intra frame.
class Encoder {
public:
    Encoder(const EncoderConfig& cfg, int width, int height, Rational fps);

    const StreamHeader& header() const { return header_; }
    const SourceBuffer& buffer() const { return buffer_; }
    const MotionModel& motion_model() const { return model_; }

    struct Output {
        Record record;
        FrameStats stats;
        Frame reconstruction;
        KeypointSet driving_keypoints;  // as transmitted; empty for Intra
    };
    Output encode_frame(const Frame& frame);

private:
    Output encode_intra(const Frame& frame, int qp, bool refine);

    EncoderConfig cfg_;
    StreamHeader header_;
    FirstOrderMotionModel model_;
    const IntraCodec& codec_;
    SourceBuffer buffer_;
    std::size_t frame_index_ = 0;
};

struct EncodeResult {
    StreamHeader header;
    std::vector<Record> records;
    std::vector<std::uint8_t> bytes;
    std::vector<FrameStats> stats;
    std::vector<Frame> reconstructions;
    std::vector<KeypointSet> driving_keypoints;
    double rate_kbps = 0;

    std::size_t intra_count() const;
};

/// Called after each record with the encoder's buffer state.
using BufferObserver = std::function<void(std::size_t record_index, const SourceBuffer& buffer)>;

EncodeResult encode_sequence(const FrameSequence& seq, const EncoderConfig& cfg,
                             const BufferObserver& observer = {});

}  // namespace dac
