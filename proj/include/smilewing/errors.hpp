#pragma once

#include <stdexcept>
#include <string>

namespace smilewing {

/// Failure categories. The numeric values of the first four are the CLI
/// exit codes and the C API status codes.
enum class ErrorKind {
    invalid_argument = 1,
    config = 2,
    condition = 3,
    numerical = 4,
    domain = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// A moment condition required by a wing formula or tail integral does not hold.
struct ConditionError : Error {
    explicit ConditionError(const std::string& what) : Error(ErrorKind::condition, what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Option price outside the open interval (intrinsic, 1).
struct PriceBoundsError : NumericalError {
    explicit PriceBoundsError(const std::string& what) : NumericalError(what) {}
};

struct BracketError : NumericalError {
    explicit BracketError(const std::string& what) : NumericalError(what) {}
};

/// Argument outside the domain of a moment generating function.
class DomainError : public Error {
public:
    DomainError(const std::string& what, double lower, double upper)
        : Error(ErrorKind::domain, what), lower_(lower), upper_(upper) {}
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

}  // namespace smilewing
