#pragma once

#include <stdexcept>
#include <string>

namespace teachlab {

/// Violated precondition, bad shape, bad argument. CLI maps this to exit 1.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem or format failure. CLI maps this to exit 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace teachlab
