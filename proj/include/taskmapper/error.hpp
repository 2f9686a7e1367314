#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taskmapper {

/// Root of every error raised by the library. The CLI maps each branch of
/// this hierarchy onto a process exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or unreadable/unwritable file.
class IoError : public Error {
public:
    using Error::Error;
};

class FileNotFound : public IoError {
public:
    explicit FileNotFound(const std::string& path)
        : IoError("file not found: " + path), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed document. `line` is 1-based; 0 when unknown.
class SchemaError : public Error {
public:
    SchemaError(std::size_t line, const std::string& message)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A well-formed document that violates a model invariant. `entity` names
/// the offending label/runnable/task/host/link.
class ValidationError : public Error {
public:
    ValidationError(std::string entity, const std::string& message)
        : Error(message), entity_(std::move(entity)) {}

    const std::string& entity() const noexcept { return entity_; }

private:
    std::string entity_;
};

class CycleError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NoRouteError : public Error {
public:
    using Error::Error;
};

class UnknownHostError : public ValidationError {
public:
    explicit UnknownHostError(const std::string& host)
        : ValidationError(host, "unknown host '" + host + "'") {}
};

class EmptyPlatformError : public ValidationError {
public:
    EmptyPlatformError()
        : ValidationError("", "platform has no host eligible for mapping") {}
};

class MappingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Raised when live processes remain but no action can make progress. Given
/// an acyclic runnable graph this indicates a kernel bug.
class DeadlockError : public Error {
public:
    using Error::Error;
};

class EmptyBatchError : public Error {
public:
    EmptyBatchError() : Error("batch contains no results") {}
};

} // namespace taskmapper
