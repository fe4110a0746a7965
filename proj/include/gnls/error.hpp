#pragma once

/**
 * @file error.hpp
 * @brief Exception hierarchy shared by every gnls module.
 *
 * Each exception carries a category that the command line driver maps onto
 * its exit-code contract (1 usage, 2 validation, 3 numerical, 4 I/O).
 */

#include <stdexcept>
#include <string>

namespace gnls {

enum class ErrorCategory { usage = 1, validation = 2, numerical = 3, io = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

#define GNLS_DEFINE_ERROR(Name, Category)                                           \
    class Name : public Error {                                                     \
    public:                                                                         \
        explicit Name(const std::string& what) : Error(ErrorCategory::Category, what) {} \
    }

GNLS_DEFINE_ERROR(UsageError, usage);
GNLS_DEFINE_ERROR(ArgumentError, validation);
GNLS_DEFINE_ERROR(ValidationError, validation);
GNLS_DEFINE_ERROR(DataError, validation);
GNLS_DEFINE_ERROR(SolverError, numerical);
GNLS_DEFINE_ERROR(ResolutionError, numerical);
GNLS_DEFINE_ERROR(OptimizerError, numerical);
GNLS_DEFINE_ERROR(TruncationError, numerical);
GNLS_DEFINE_ERROR(OverflowError, numerical);
GNLS_DEFINE_ERROR(IoError, io);

#undef GNLS_DEFINE_ERROR

/// Raised when g_max <= 0, i.e. the nonlinearity admits no ground state.
class NonfocusingError : public Error {
public:
    explicit NonfocusingError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// Schema violation while reading JSON; `pointer` is the RFC 6901 location.
class ParseError : public Error {
public:
    ParseError(const std::string& pointer, const std::string& what)
        : Error(ErrorCategory::validation, pointer + ": " + what), pointer_(pointer) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

} // namespace gnls
