#pragma once

#include <stdexcept>
#include <string>

namespace dsf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A precondition on an argument was violated (domain error, bad index, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// An experiment configuration failed to parse or validate. `field` names the
/// offending JSON path (e.g. "replicas" or "graph.L").
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& msg)
        : Error(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A simulation exceeded its configured event ceiling.
class EventCeilingExceeded : public Error {
public:
    explicit EventCeilingExceeded(const std::string& msg) : Error(msg) {}
};

/// A parameter lies outside the range where an evaluator is numerically stable.
class UnsupportedRange : public Error {
public:
    explicit UnsupportedRange(const std::string& msg) : Error(msg) {}
};

/// Random regular graph generation gave up after its retry cap.
class GenerationFailed : public Error {
public:
    explicit GenerationFailed(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace dsf
