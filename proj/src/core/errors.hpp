#pragma once

#include <stdexcept>
#include <string>

namespace dpi {

// Bad arguments from a caller: unknown ids, malformed configuration.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Data outside the abstraction domain: cyclic reference structure,
// singular-source closure breaks, non-equivalent renesting.
class DomainViolation : public std::runtime_error {
public:
    explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant; maps to process exit code 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace dpi
