#include "dac/encoder.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dac/error.hpp"
#include "dac/keypoint_coder.hpp"
#include "dac/metrics.hpp"

namespace dac {

void EncoderConfig::validate() const {
    if (!(tau > 0)) throw std::invalid_argument("τ>0 required");
    check_qp(qp0);
    if (qp_min < kMinQp || qp_min > qp0) throw std::invalid_argument("qp_min must be in [0, qp0]");
    if (buffer_capacity < 1 || buffer_capacity > 255) throw std::invalid_argument("buffer capacity must be in [1, 255]");
    if (motion.num_keypoints < 1 || motion.num_keypoints > 255)
        throw std::invalid_argument("number of keypoints must be in [1, 255]");
    if (motion.sigma_heat < 0 || !(motion.sigma_w > 0) || motion.beta < 0)
        throw std::invalid_argument("invalid motion parameters");
}

MotionParams motion_params_from_header(const StreamHeader& header) {
    return {header.num_keypoints, header.sigma_heat, header.sigma_w, header.beta};
}

StreamHeader make_header(const EncoderConfig& cfg, int width, int height, Rational fps) {
    cfg.validate();
    if (width < 1 || height < 1 || width > 0xFFFF || height > 0xFFFF) throw Error("frame size not codable");
    if (fps.num < 1 || fps.den < 1 || fps.num > 0xFFFF || fps.den > 0xFFFF) throw Error("fps not codable");
    StreamHeader h;
    h.width = static_cast<std::uint16_t>(width);
    h.height = static_cast<std::uint16_t>(height);
    h.fps_num = static_cast<std::uint16_t>(fps.num);
    h.fps_den = static_cast<std::uint16_t>(fps.den);
    h.num_keypoints = static_cast<std::uint8_t>(cfg.motion.num_keypoints);
    h.buffer_capacity = static_cast<std::uint8_t>(cfg.buffer_capacity);
    h.intra_codec = IntraCodecTag::ReferenceDct;
    h.sigma_heat = static_cast<float>(cfg.motion.sigma_heat);
    h.sigma_w = static_cast<float>(cfg.motion.sigma_w);
    h.beta = static_cast<float>(cfg.motion.beta);
    h.qp0 = static_cast<std::uint8_t>(cfg.qp0);
    h.tau = static_cast<float>(cfg.tau);
    return h;
}

BestSource select_best_source(const SourceBuffer& buffer, const Frame& target, const KeypointSet& target_kp,
                              const MotionModel& model) {
    if (buffer.empty()) throw std::invalid_argument("select_best_source: empty buffer");
    BestSource best;
    best.slot = -1;
    for (std::size_t slot = 0; slot < buffer.size(); ++slot) {
        Frame rec = model.reconstruct(buffer[slot].frame, buffer[slot].keypoints, target_kp);
        const double p = psnr(rec, target);
        if (best.slot < 0 || p >= best.psnr_db) {  // >= : ties resolve to the newer slot
            best.slot = static_cast<int>(slot);
            best.psnr_db = p;
            best.reconstruction = std::move(rec);
        }
    }
    return best;
}

QpRefinement refine_intra_qp(const Frame& frame, double tau, int qp0, int qp_min, const IntraCodec& codec) {
    if (!(tau > 0)) throw std::invalid_argument("τ>0 required");
    check_qp(qp0);
    check_qp(qp_min);
    QpRefinement out;
    int qp = qp0;
    for (;;) {
        Frame rec = codec.encode_decode(frame, qp);
        const double p = psnr(frame, rec);
        if (p >= tau || qp <= qp_min) {
            out.constraint_met = p >= tau;
            out.psnr_db = p;
            break;
        }
        --qp;
    }
    out.qp = qp;
    out.payload = codec.encode(frame, qp);
    out.decoded = codec.decode(out.payload);
    return out;
}

void write_stats_csv(std::ostream& out, const std::vector<FrameStats>& stats) {
    out << "frame,mode,slot,qp,bits,psnr_db\n";
    for (const auto& s : stats) {
        out << s.index << ',' << (s.mode == FrameMode::Intra ? "intra" : "inter") << ',';
        if (s.slot >= 0) out << s.slot;
        out << ',';
        if (s.qp >= 0) out << s.qp;
        out << ',' << s.bits << ',' << s.psnr_db << '\n';
    }
}

Encoder::Encoder(const EncoderConfig& cfg, int width, int height, Rational fps)
    : cfg_(cfg),
      header_(make_header(cfg, width, height, fps)),
      model_(motion_params_from_header(header_)),
      codec_(intra_codec_for(header_.intra_codec)),
      buffer_(header_.buffer_capacity) {
    // Decisions use the same binary32 threshold the header carries.
    cfg_.tau = header_.tau;
}

Encoder::Output Encoder::encode_intra(const Frame& frame, int qp, bool refine) {
    Output out;
    IntraRecord rec;
    if (refine) {
        auto r = refine_intra_qp(frame, cfg_.tau, qp, cfg_.qp_min, codec_);
        rec.qp = static_cast<std::uint8_t>(r.qp);
        rec.payload = std::move(r.payload);
        out.reconstruction = std::move(r.decoded);
        out.stats.constraint_unmet = !r.constraint_met;
    } else {
        rec.qp = static_cast<std::uint8_t>(qp);
        rec.payload = codec_.encode(frame, qp);
        out.reconstruction = codec_.decode(rec.payload);
    }
    out.stats.mode = FrameMode::Intra;
    out.stats.qp = rec.qp;
    out.stats.psnr_db = psnr(out.reconstruction, frame);
    buffer_.push({out.reconstruction, model_.extract(out.reconstruction)});
    out.record = std::move(rec);
    return out;
}

Encoder::Output Encoder::encode_frame(const Frame& frame) {
    if (frame.width() != header_.width || frame.height() != header_.height)
        throw Error("frame " + std::to_string(frame_index_) + " does not match stream dimensions");
    Output out;
    if (frame_index_ == 0 || cfg_.all_intra) {
        out = encode_intra(frame, cfg_.qp0, false);
    } else {
        const auto q = quantize_keypoints(model_.extract(frame));
        KeypointSet driving = dequantize_keypoints(q).keypoints;
        BestSource best = select_best_source(buffer_, frame, driving, model_);
        if (best.psnr_db > cfg_.tau) {
            out.record = InterRecord{static_cast<std::uint8_t>(best.slot), encode_keypoints(q)};
            out.stats.mode = FrameMode::Inter;
            out.stats.slot = best.slot;
            out.stats.psnr_db = best.psnr_db;
            out.reconstruction = std::move(best.reconstruction);
            out.driving_keypoints = std::move(driving);
        } else {
            out = encode_intra(frame, cfg_.qp0, true);
        }
    }
    out.stats.index = frame_index_++;
    out.stats.bits = record_size(out.record) * 8;
    return out;
}

std::size_t EncodeResult::intra_count() const {
    std::size_t n = 0;
    for (const auto& r : records) n += std::holds_alternative<IntraRecord>(r);
    return n;
}

EncodeResult encode_sequence(const FrameSequence& seq, const EncoderConfig& cfg, const BufferObserver& observer) {
    if (seq.empty()) throw Error("empty sequence");
    validate_sequence(seq);
    Encoder enc(cfg, seq.frames[0].width(), seq.frames[0].height(), seq.fps);
    EncodeResult res;
    res.header = enc.header();
    for (const Frame& f : seq.frames) {
        auto out = enc.encode_frame(f);
        res.records.push_back(std::move(out.record));
        res.stats.push_back(out.stats);
        res.reconstructions.push_back(std::move(out.reconstruction));
        res.driving_keypoints.push_back(std::move(out.driving_keypoints));
        if (observer) observer(res.records.size() - 1, enc.buffer());
    }
    res.bytes = write_stream(res.header, res.records);
    res.rate_kbps = measure_rate(res.records, seq.fps.value(), seq.size());
    return res;
}

}  // namespace dac
