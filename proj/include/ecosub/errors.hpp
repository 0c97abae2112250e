#pragma once

#include <stdexcept>
#include <string>

namespace ecosub {

// Each error family maps to one CLI exit code (see tools/ecosub_cli.cpp).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ecosub
