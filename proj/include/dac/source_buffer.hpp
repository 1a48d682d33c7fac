#pragma once

#include <cstddef>
#include <deque>

#include "dac/frame.hpp"
#include "dac/motion_model.hpp"

namespace dac {

struct SourceEntry {
    Frame frame;  // always a decoded frame
    KeypointSet keypoints;
    friend bool operator==(const SourceEntry&, const SourceEntry&) = default;
};

/// FIFO of decoded Intra frames and their keypoints, mirrored by encoder and decoder.
/// Slot 0 is the oldest entry; pushing into a full buffer evicts it.
class SourceBuffer {
public:
    explicit SourceBuffer(std::size_t capacity = 5);

    void push(SourceEntry entry);

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const SourceEntry& operator[](std::size_t slot) const { return entries_[slot]; }

    friend bool operator==(const SourceBuffer&, const SourceBuffer&) = default;

private:
    std::size_t capacity_;
    std::deque<SourceEntry> entries_;
};

}  // namespace dac
