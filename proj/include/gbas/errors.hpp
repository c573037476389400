#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbas {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed almanac text. Carries the 1-based line number of the offending record field.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class SingularGeometry : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Every satellite that could help has reached the broadcast ceiling and a
/// screening constraint still fails.
class Unscreenable : public Error {
public:
    using Error::Error;
};

/// A screened output failed independent re-verification. This is an integrity bug.
class IntegrityFailure : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

}  // namespace gbas
