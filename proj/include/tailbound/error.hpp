#pragma once

#include <stdexcept>
#include <string>

namespace tailbound {

enum class ErrorKind {
    invalid_parameter,
    invalid_model,
    no_saddlepoint,
    out_of_range,
    hypothesis_violation,
    unsupported,
    parse_error,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception; `kind()` lets callers map failures to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tailbound
