// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace remskit {

// Bad arguments, inconsistent dimensions, malformed files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, int line);
    int line() const { return line_; }

private:
    int line_;
};

// Ill-conditioned or singular systems, undefined ratios.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConditioningError : public NumericError {
public:
    ConditioningError(const std::string& loop, double condition);
    const std::string& loop() const { return loop_; }
    double condition() const { return condition_; }

private:
    std::string loop_;
    double condition_;
};

}  // namespace remskit
