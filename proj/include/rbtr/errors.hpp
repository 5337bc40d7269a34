#pragma once

#include <stdexcept>
#include <string>

namespace rbtr {

/// Shapes or mode indices that do not fit the operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Backend failures and non-finite values during iterative solves.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable, truncated or malformed files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rbtr
