#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dnsbot {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    /// 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Precondition or argument violation detected at a public entry point.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace dnsbot
