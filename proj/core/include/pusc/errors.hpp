#pragma once

#include <stdexcept>
#include <string>

namespace pusc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An argument is outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input data is malformed (CSV cells, label values, missing columns).
class FormatError : public Error {
public:
    using Error::Error;
};

/// The data is well formed but cannot support the requested computation,
/// e.g. an empty class.
class DataError : public Error {
public:
    using Error::Error;
};

/// A computation produced NaN or Inf.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training diverged; the message names the epoch and batch.
class TrainingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace pusc
