#pragma once

#include <stdexcept>

namespace qrng {

// Invalid argument value (maps to a CLI usage error).
struct param_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The requested model or operating point cannot be realized, e.g. a measured
// bit probability that no equivalent efficiency <= 1 reproduces.
struct infeasible_error : std::domain_error {
    using std::domain_error::domain_error;
};

// An enumeration or table size guard was exceeded.
struct resource_error : std::length_error {
    using std::length_error::length_error;
};

// Filesystem / stream failure.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally invalid input file: bad magic, truncated payload, header
// mismatch between companion files.
struct parse_error : io_error {
    using io_error::io_error;
};

}  // namespace qrng
