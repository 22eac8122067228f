#pragma once

#include <stdexcept>
#include <string>

namespace annblock {

/// Bad input data or parameters: unknown column, ragged matrix, schema
/// mismatch. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem-level failure: missing file, unwritable path. Maps to CLI
/// exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace annblock
