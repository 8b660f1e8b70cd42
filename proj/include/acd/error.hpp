#pragma once

#include <stdexcept>
#include <string>

namespace acd {

// Bad user-supplied values: dimensions, ranges, non-finite entries.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inconsistent solver or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& detail, std::size_t line, const std::string& source = {})
        : std::runtime_error((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + detail),
          detail_(detail), line_(line) {}

    const std::string& detail() const noexcept { return detail_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string detail_;
    std::size_t line_;
};

// Iterates or objective values became non-finite.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace acd
