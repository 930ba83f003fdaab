#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anchormatch {

enum class ErrorKind {
    Parse,
    InvalidArgument,
    Unsupported,
    DigestMismatch,
    Format,
    Io,
    InvalidQuery,
    Infeasible,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

enum class ParseFailure {
    Malformed,
    UnknownVertex,
    DuplicateEdge,
    SelfLoop,
    DegreeMismatch,
    CountMismatch,
};

/// Graph text parse failure; `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(ParseFailure failure, std::size_t line, const std::string& detail)
        : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + detail),
          failure_(failure), line_(line) {}

    ParseFailure failure() const noexcept { return failure_; }
    std::size_t line() const noexcept { return line_; }

private:
    ParseFailure failure_;
    std::size_t line_;
};

}  // namespace anchormatch
