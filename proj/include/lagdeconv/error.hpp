#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lagdeconv {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Triangular solve against an operator whose diagonal is (numerically) zero.
class SingularOperator : public Error {
public:
    using Error::Error;
};

/// Least-squares design whose columns are numerically dependent.
class RankDeficient : public Error {
public:
    RankDeficient(const std::string& what, std::size_t order)
        : Error(what), order_(order) {}

    /// Zero-based basis order of the first dependent column.
    std::size_t order() const noexcept { return order_; }

private:
    std::size_t order_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, const std::string& source = {})
        : Error((source.empty() ? std::string() : source + ": ") + "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace lagdeconv
