#ifndef DRIFTGAUGE_ERRORS_HPP
#define DRIFTGAUGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace driftgauge {

// Syntax error while parsing an expression; offset is the byte position in
// the input text where the error was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Evaluation hit a point outside the domain of some subexpression
// (log/sqrt of a negative number, division by zero, invalid power).
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what_failed, double x)
        : std::runtime_error(what_failed + " at x=" + std::to_string(x)),
          subexpression_(what_failed), point_(x) {}
    const std::string& subexpression() const { return subexpression_; }
    double point() const { return point_; }

private:
    std::string subexpression_;
    double point_;
};

// A model file or parameter set failed validation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature exhausted its subdivision budget.
class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace driftgauge

#endif
