#pragma once

#include <stdexcept>
#include <string>

namespace expklms {

// A mean, parameter or index fell outside the set where the operation is
// defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An operation was called before its precondition holds (e.g. sampling
// probabilities requested before every arm was pulled).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// An iterative numerical routine hit its iteration cap.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace expklms
