#pragma once

#include <stdexcept>

namespace qdcav {

// Invalid configuration or input files; maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure during a simulation; maps to CLI exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qdcav
