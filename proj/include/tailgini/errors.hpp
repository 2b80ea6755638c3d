#pragma once

#include <stdexcept>

namespace tailgini {

// File and parsing failures (missing files, malformed rows, bad headers).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric failures inside an estimation routine (non-convergence,
// divergent integrals, degenerate inputs discovered mid-computation).
class estimation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tailgini
