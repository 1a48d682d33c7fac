#include "dac/decoder.hpp"

#include <string>

#include "dac/error.hpp"
#include "dac/keypoint_coder.hpp"

namespace dac {

Decoder::Decoder(const StreamHeader& header)
    : header_(header),
      model_(motion_params_from_header(header)),
      codec_(intra_codec_for(header.intra_codec)),
      buffer_(header.buffer_capacity) {}

Frame Decoder::decode(const Record& record) {
    last_regularized_.clear();
    if (const auto* intra = std::get_if<IntraRecord>(&record)) {
        if (intra->payload.empty() || intra->payload[0] != static_cast<std::uint8_t>(header_.intra_codec))
            throw Error("intra payload codec tag does not match stream header");
        Frame f = codec_.decode(intra->payload);
        if (f.width() != header_.width || f.height() != header_.height)
            throw Error("intra frame dimension mismatch vs header");
        buffer_.push({f, model_.extract(f)});
        return f;
    }
    const auto& inter = std::get<InterRecord>(record);
    if (inter.source_slot >= buffer_.size())
        throw Error("slot out of range: " + std::to_string(inter.source_slot));
    auto kp = decode_keypoints(inter.keypoints, header_.num_keypoints);
    last_regularized_ = std::move(kp.regularized);
    const auto& src = buffer_[inter.source_slot];
    return model_.reconstruct(src.frame, src.keypoints, kp.keypoints);
}

FrameSequence decode_sequence(std::span<const std::uint8_t> bytes, const DecodeOptions& options,
                              const BufferObserver& observer) {
    StreamReader reader(bytes);
    Decoder decoder(reader.header());
    FrameSequence out;
    out.fps = {reader.header().fps_num, reader.header().fps_den};
    for (;;) {
        std::optional<Record> rec;
        try {
            rec = reader.next();
        } catch (const TruncatedError&) {
            if (options.allow_truncated_tail) break;
            throw;
        }
        if (!rec) break;
        out.frames.push_back(decoder.decode(*rec));
        if (observer) observer(out.frames.size() - 1, decoder.buffer());
    }
    return out;
}

}  // namespace dac
