#pragma once

#include <stdexcept>
#include <string>

namespace explab {

/// Invalid or unsupported configuration (env identifiers, hyperparameters, JSON schema).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An API was called in a state that does not allow it (e.g. stepping a finished episode).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Broken internal ordering or invariant; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A loss or gradient became non-finite during optimization.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace explab
