#pragma once

#include <stdexcept>
#include <string>

namespace trires {

// Invalid inputs, malformed files, out-of-domain parameters. CLI exit code 1.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure on inputs that passed validation. CLI exit code 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace trires
