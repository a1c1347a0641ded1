#pragma once

#include <stdexcept>
#include <string>

namespace autoconj {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Raised where a proper function (at least one finite value) is required.
class ImproperFunction : public Error {
public:
    using Error::Error;
};

class NotMonotone : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace autoconj
