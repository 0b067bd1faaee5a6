#pragma once

#include <stdexcept>
#include <string>

namespace finiteroc {

// Bad inputs: shape mismatches, out-of-range parameters, malformed files.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures: quadrature non-convergence, invalid approximation regime.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace finiteroc
