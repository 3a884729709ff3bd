#pragma once

#include <stdexcept>
#include <string>

namespace fairsel {

/// Invalid or inconsistent configuration (CLI maps this to exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Problems with input data: missing files, bad cells, shape mismatches (exit code 2).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or failed numeric checks (exit code 3).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairsel
