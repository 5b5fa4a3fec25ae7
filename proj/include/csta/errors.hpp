// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csta {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or rank mismatch between tensors.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A precondition of an operation was violated.
class ContractError : public Error {
public:
    using Error::Error;
};

/// An index (class label, sample number, axis) is out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line)
        : Error(message + " (line " + std::to_string(line) + ")"),
          line_(line) {}
    explicit ParseError(const std::string& message) : Error(message), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A skeleton file contained no usable body in any frame.
class EmptySampleError : public Error {
public:
    using Error::Error;
};

/// A structured document violated its schema. Carries the offending path.
class ValidationError : public Error {
public:
    ValidationError(const std::string& message, const std::string& path)
        : Error(message + " at " + path), path_(path) {}
    explicit ValidationError(const std::string& message) : Error(message) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Training produced a non-finite loss or gradient.
class DivergedError : public Error {
public:
    DivergedError(const std::string& message, std::size_t epoch, std::size_t step)
        : Error(message + " (epoch " + std::to_string(epoch) + ", step " +
                std::to_string(step) + ")"),
          epoch_(epoch), step_(step) {}
    std::size_t epoch() const { return epoch_; }
    std::size_t step() const { return step_; }

private:
    std::size_t epoch_;
    std::size_t step_;
};

/// Filesystem or serialization failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace csta
