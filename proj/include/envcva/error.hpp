#pragma once

#include <stdexcept>
#include <string>

namespace envcva {

enum class ErrorKind { validation, data, numeric };

// Base of every error the engine raises. The kind maps onto the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
        case ErrorKind::validation: return 2;
        case ErrorKind::data: return 3;
        case ErrorKind::numeric: return 4;
        }
        return 1;
    }

    const char* kind_name() const noexcept {
        switch (kind_) {
        case ErrorKind::validation: return "validation";
        case ErrorKind::data: return "data";
        case ErrorKind::numeric: return "numeric";
        }
        return "unknown";
    }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

} // namespace envcva
