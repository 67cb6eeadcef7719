#pragma once

#include <stdexcept>
#include <string>

namespace charprobe {

// Problem with user-supplied data or files (bad bytes, missing entries,
// contract violations on inputs). The CLI maps these to exit code 2;
// argument/usage errors exit 1 before any work starts.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace charprobe
