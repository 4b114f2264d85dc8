#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

// Bad inputs: malformed controls, inconsistent orders, violated preconditions.
// The CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime guards: normalization drift, trajectory leaving the closed ball,
// singular jets where a unit is required.  The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace loewner
