#pragma once

#include <stdexcept>
#include <string>

namespace dpocs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument: dimension mismatch, violated precondition, invalid parameter.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The mathematics failed: singular systems, infeasible problems, bracket failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable file. The message names the file and line/offset.
class IoError : public Error {
public:
    using Error::Error;
};

/// JSON document violates its schema. `path()` is a JSON pointer to the offending node.
class SchemaError : public IoError {
public:
    SchemaError(std::string path, const std::string& what)
        : IoError(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace dpocs
