#pragma once

#include <stdexcept>
#include <string>

namespace nlwd {

// File, parse, format, and sizing problems (CLI exit code 2).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-convergence and other numerical failures (CLI exit code 3).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlwd
