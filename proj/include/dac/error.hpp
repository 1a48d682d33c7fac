#pragma once

#include <stdexcept>
#include <string>

namespace dac {

// Malformed or inconsistent data: bad files, corrupt streams, mismatched sizes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input ended before a complete unit (frame payload, record) could be read.
class TruncatedError : public Error {
public:
    using Error::Error;
};

}  // namespace dac
