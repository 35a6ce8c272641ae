#pragma once

#include <stdexcept>
#include <string>

namespace dualcause {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerically singular conditioning block or failed Cholesky factorization.
class SingularBlock : public Error {
public:
    using Error::Error;
};

// Empirical covariance is not positive definite (n < d or collinear columns).
class SingularCovariance : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

// Non-positive leading coefficient in a confidence-interval quadratic.
class DegenerateQuadratic : public Error {
public:
    using Error::Error;
};

class GenerationExhausted : public Error {
public:
    using Error::Error;
};

class InvalidSampleCount : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace dualcause
