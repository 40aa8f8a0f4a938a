#pragma once

#include <stdexcept>
#include <string>

namespace omlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad JSON, unknown labels, out-of-range indices.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// An enumeration would exceed the configured state-space cap.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace omlab
