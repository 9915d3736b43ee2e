#pragma once

#include <stdexcept>
#include <string>

namespace jumpmil {

// Violation of a model or intensity contract (commutativity, lambda_max
// bound, degenerate density, ...). CLI maps this to exit code 2.
struct contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config-file or command-line validation problem. CLI maps this to exit 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime numerical failure (non-finite values, failed root find, ...).
// CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace jumpmil
