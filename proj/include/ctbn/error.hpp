#pragma once

#include <stdexcept>
#include <string>

namespace ctbn {

enum class ErrorKind {
    InvalidConfig,
    InvalidParameter,
    InvalidInput,
    Capacity,
    NoUniqueStationary,
    DegenerateTriple,
    UndefinedBound,
    Unsupported,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::NoUniqueStationary: return "no-unique-stationary";
    case ErrorKind::DegenerateTriple: return "degenerate-triple";
    case ErrorKind::UndefinedBound: return "undefined-bound";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace ctbn
