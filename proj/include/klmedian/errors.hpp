#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace klmedian {

/// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an enumeration or grid would exceed its configured cap.
class CapacityError : public std::runtime_error {
public:
    CapacityError(const std::string& what, double required, double cap)
        : std::runtime_error(what + ": requires " + format_count(required) +
                             " but cap is " + format_count(cap)),
          required_(required), cap_(cap) {}

    double required() const { return required_; }
    double cap() const { return cap_; }

private:
    static std::string format_count(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    double required_;
    double cap_;
};

/// Malformed dataset input. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace klmedian
