#include "dac/source_buffer.hpp"

#include <stdexcept>

namespace dac {

SourceBuffer::SourceBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("buffer capacity must be >= 1");
}

void SourceBuffer::push(SourceEntry entry) {
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back(std::move(entry));
}

}  // namespace dac
