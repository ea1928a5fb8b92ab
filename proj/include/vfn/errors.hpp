#pragma once

#include <stdexcept>
#include <string>

namespace vfn {

// Error taxonomy. The CLI maps these onto its exit-code contract:
// UsageError -> 1, DataError family -> 2, everything else here -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer dimension disagreement.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Out-of-bounds coordinate or offset.
class IndexError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value (ratio >= 1, crop larger than source, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent external data (files, manifests, labels).
class DataError : public Error {
public:
    using Error::Error;
};

// Descriptor/model text that fails to parse; carries a message with a
// line number where one is known.
class ParseError : public DataError {
public:
    using DataError::DataError;
};

// File-level I/O failure.
class IoError : public DataError {
public:
    using DataError::DataError;
};

// API called out of order or on corrupted state (backward before forward,
// negative stored variance, ...).
class StateError : public Error {
public:
    using Error::Error;
};

// Numeric-domain failure (zero-vector cosine, learning-rate range, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

// Bad command-line invocation.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace vfn
