#pragma once

#include <stdexcept>
#include <string>

namespace pulse {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document. Carries the 1-based line and the offending field.
class ParseError : public Error {
public:
    ParseError(std::string message, int line, std::string field)
        : Error(format(message, line, field)), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& message, int line, const std::string& field) {
        std::string out = "line " + std::to_string(line);
        if (!field.empty()) out += ", field '" + field + "'";
        return out + ": " + message;
    }

    int line_;
    std::string field_;
};

/// A value violates a documented invariant or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operation is not legal in the object's current state (double close, unprimed cache...).
class StateError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

/// Persistence layer failure.
class StorageError : public Error {
public:
    using Error::Error;
};

}  // namespace pulse
