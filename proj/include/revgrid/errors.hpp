#pragma once

#include <stdexcept>
#include <string>

namespace revgrid {

/// Error taxonomy used across the library. The CLI maps ConfigError to exit
/// code 2 and everything else derived from Error to exit code 3.
enum class ErrorKind {
    InvalidInput,
    InvalidState,
    Numerical,
    SingularMatrix,
    UnderDetermined,
    Configuration,
    Optimization,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Configuration, what) {}
};

}  // namespace revgrid
