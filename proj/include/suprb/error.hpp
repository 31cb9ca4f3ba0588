#pragma once

#include <stdexcept>
#include <string>

namespace suprb {

// Base of every error raised by the library. Categories map onto CLI exit
// codes (see cli.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A candidate interval matched no training example.
class EmptyMatchError : public Error {
public:
    using Error::Error;
};

// Operation needs a fitted object.
class StateError : public Error {
public:
    using Error::Error;
};

// Malformed or non-finite input data, including CSV parse failures.
class DataError : public Error {
public:
    using Error::Error;
};

class DegenerateFeatureError : public DataError {
public:
    using DataError::DataError;
};

class DegenerateTargetError : public DataError {
public:
    using DataError::DataError;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Model file is not well-formed.
class SchemaError : public Error {
public:
    using Error::Error;
};

class VersionMismatchError : public SchemaError {
public:
    using SchemaError::SchemaError;
};

// All paired differences are zero.
class DegenerateTestError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace suprb
