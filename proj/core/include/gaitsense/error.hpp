#pragma once

#include <stdexcept>
#include <string>

namespace gaitsense {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Matrix or vector of the wrong shape.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of an operation (unknown token, i == j, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Input that cannot support the requested computation (too few distinct
// values, too few steps, a single class, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class GapError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace gaitsense
