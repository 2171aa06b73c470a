#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ztac {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (out-of-range value, empty input, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed external input. `line()` is 1-based, 0 when not line oriented.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Lookup of a token or attribute the model does not know.
class UnknownToken : public Error {
public:
    using Error::Error;
};

// Failure of one stage of a multi-stage pipeline; the stage label prefixes the message.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace ztac
