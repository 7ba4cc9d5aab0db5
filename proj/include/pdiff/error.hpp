#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdiff {

/// Malformed input: bad files, bad expressions, violated preconditions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expression syntax error; offset is the byte position in the source text.
class SyntaxError : public InputError {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : InputError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Numerical failure: non-finite evaluation, non-convergence, empty valid region.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pdiff
