#pragma once

#include <stdexcept>
#include <string>

namespace oscbound {

// Raised by the expression parser; `offset` is the byte position in the input.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t offset)
        : std::runtime_error(std::move(msg)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Evaluation outside the domain of an elementary function (log of a
// non-positive value, division by ~zero, abs at the kink, ...).
class DomainError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Anything else that goes wrong while evaluating (missing coordinate,
// NaN escaping an integrand, quadrature misuse, ...).
class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace oscbound
