#pragma once

#include <stdexcept>
#include <string>

namespace mfpotts {

// Base of everything the library throws. The CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition (bad parameter, wrong shape, nonzero diagonal where forbidden).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An enumeration would exceed its configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

// Malformed input file or stream.
class ParseError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace mfpotts
