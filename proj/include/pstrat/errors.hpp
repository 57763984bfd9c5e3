#pragma once

#include <stdexcept>
#include <string>

namespace pstrat {

// Malformed input, schema violations, out-of-domain arguments.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data that contradicts an identifying assumption (monotonicity, support,
// resampling stability). Reported separately so callers can tell a bad file
// from a design whose assumptions fail.
class AssumptionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pstrat
