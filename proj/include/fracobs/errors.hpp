#pragma once

#include <stdexcept>
#include <string>

namespace fracobs {

/// Non-finite or out-of-domain numeric argument.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Shapes that do not fit together (non-square pattern, column mismatch, ...).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A request beyond the horizon K a system was built for.
class HorizonError : public std::out_of_range {
public:
    explicit HorizonError(const std::string& what) : std::out_of_range(what) {}
};

/// Instance too large for an exhaustive routine.
class CapacityError : public std::length_error {
public:
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

/// Malformed system file, sensor list or command-line value.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fracobs
