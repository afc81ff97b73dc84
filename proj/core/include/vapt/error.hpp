#pragma once

#include <stdexcept>
#include <string>

namespace vapt {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structured input (JSON file, interchange record, config) violated its schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Caller passed an argument outside the operation's contract.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace vapt
