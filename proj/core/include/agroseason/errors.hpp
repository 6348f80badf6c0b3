#ifndef AGROSEASON_ERRORS_HPP
#define AGROSEASON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace agroseason {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller asked for something the API cannot do (unknown variable, bad
// bin edges, index out of range). Maps to CLI exit code 1.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

// The input data is malformed or violates a documented constraint
// (unparseable CSV, duplicate dates, out-of-range magnitudes).
// Maps to CLI exit code 2.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Not enough observations to run the requested computation.
class InsufficientDataError : public DataError {
public:
    explicit InsufficientDataError(const std::string& msg) : DataError(msg) {}
};

// The sample has no spread (zero variance), so scale-based statistics
// are undefined on it.
class DegenerateSampleError : public DataError {
public:
    explicit DegenerateSampleError(const std::string& msg) : DataError(msg) {}
};

} // namespace agroseason

#endif
