#pragma once

#include <stdexcept>
#include <string>

namespace trapflow {

// Argument outside the admissible saturation/potential range.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The flux model violates a structural assumption required by an operation.
class AssumptionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The requested data regime is not covered by the operation.
class UnsupportedRegime : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iterative solver failure, CFL violation, NaN detection.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace trapflow
