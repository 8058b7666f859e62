#pragma once

#include <stdexcept>
#include <string>

namespace mba {

// Every failure the library reports derives from Error. The CLI maps the
// three families below onto exit codes 2, 3 and 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad preset name, mixture weights, arm index, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed persisted data (dataset, embedding file, checkpoint, log).
class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionError : public FormatError {
public:
    using FormatError::FormatError;
};

class DuplicateError : public FormatError {
public:
    using FormatError::FormatError;
};

class LookupError : public FormatError {
public:
    using FormatError::FormatError;
};

class EmptyInputError : public FormatError {
public:
    using FormatError::FormatError;
};

/// A non-finite value appeared during training or scoring.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace mba
