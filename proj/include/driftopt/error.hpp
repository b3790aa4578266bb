#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace driftopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A data-model invariant was violated. `index()` names the offending row or
/// dimension, or `npos` when the violation is not tied to one element.
class ValidationError : public Error {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    ValidationError(const std::string& what, std::size_t index = npos)
        : Error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace driftopt
