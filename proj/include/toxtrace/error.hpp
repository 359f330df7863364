#pragma once

#include <stdexcept>
#include <string>

namespace toxtrace {

// Error categories map onto the CLI exit-code contract:
// input/config/usage/io problems exit 2, everything else is a stage failure.
enum class ErrorKind {
    io,
    input,
    config,
    usage,
    provider,
    protocol,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    // true for errors the user can fix by changing inputs or flags
    bool is_user_error() const {
        return kind_ == ErrorKind::io || kind_ == ErrorKind::input ||
               kind_ == ErrorKind::config || kind_ == ErrorKind::usage;
    }

private:
    ErrorKind kind_;
};

} // namespace toxtrace
