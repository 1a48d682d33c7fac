#pragma once

#include <span>

#include "dac/bitstream.hpp"
#include "dac/encoder.hpp"
#include "dac/frame.hpp"
#include "dac/source_buffer.hpp"

namespace dac {

class Decoder {
public:
    explicit Decoder(const StreamHeader& header);

    const StreamHeader& header() const { return header_; }
    const SourceBuffer& buffer() const { return buffer_; }

    /// Decodes one record. Intra frames enter the buffer; Inter frames never do.
    Frame decode(const Record& record);

    /// Keypoint indices re-regularized while decoding the last Inter record.
    const std::vector<int>& last_regularized() const { return last_regularized_; }

private:
    StreamHeader header_;
    FirstOrderMotionModel model_;
    const IntraCodec& codec_;
    SourceBuffer buffer_;
    std::vector<int> last_regularized_;
};

struct DecodeOptions {
    /// Stop quietly at a partial trailing record instead of throwing (prefix decoding).
    bool allow_truncated_tail = false;
};

FrameSequence decode_sequence(std::span<const std::uint8_t> bytes, const DecodeOptions& options = {},
                              const BufferObserver& observer = {});

}  // namespace dac
