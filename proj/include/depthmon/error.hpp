#pragma once

#include <stdexcept>
#include <string>

namespace depthmon {

// Invalid arguments and configuration violations surface as std::invalid_argument.
// The two types below cover the remaining failure classes the CLI maps to exit codes.

/// A computation that is well-posed in general but degenerate for the given data
/// (zero scale, zero-width grid, empty binned sample, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace depthmon
