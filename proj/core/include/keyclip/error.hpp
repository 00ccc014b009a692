#pragma once

#include <stdexcept>
#include <string>

namespace keyclip {

enum class ErrorKind {
    invalid_input,
    invalid_parameter,
    insufficient_pool,
    format,
    configuration,
    transport,
    scoring,
    io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base error for everything the library throws. The kind drives the CLI
/// exit code (validation kinds map to 2, runtime kinds to 3).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(ErrorKind::invalid_input, what) {}
};

class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what) : Error(ErrorKind::invalid_parameter, what) {}
};

class InsufficientPool : public Error {
public:
    explicit InsufficientPool(const std::string& what) : Error(ErrorKind::insufficient_pool, what) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(ErrorKind::format, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::configuration, what) {}
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& what) : Error(ErrorKind::transport, what) {}
};

class ScoringError : public Error {
public:
    explicit ScoringError(const std::string& what) : Error(ErrorKind::scoring, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

} // namespace keyclip
