#pragma once

#include <stdexcept>
#include <string>

namespace flowtube {

// Failure categories map one-to-one onto CLI exit codes.
enum class ErrorCategory {
    input = 1,              // malformed input, invalid parameters, parse errors
    physical_validity = 2,  // back-diffusion, infeasible designs
    fit = 3,                // non-convergence surfaced as an error
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class InvalidSpecError : public Error {
public:
    explicit InvalidSpecError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

class SingularGeometryError : public Error {
public:
    explicit SingularGeometryError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

class CalibrationError : public Error {
public:
    explicit CalibrationError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

class BackDiffusionError : public Error {
public:
    explicit BackDiffusionError(const std::string& what)
        : Error(ErrorCategory::physical_validity, what) {}
};

class InfeasibleDesignError : public Error {
public:
    explicit InfeasibleDesignError(const std::string& what)
        : Error(ErrorCategory::physical_validity, what) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(ErrorCategory::fit, what) {}
};

} // namespace flowtube
