#pragma once
#include <stdexcept>
#include <string>

namespace cpb {

// Precondition/contract violations: bad ranges, mismatched lengths,
// malformed inputs. CLI maps these to exit code 2.
struct invalid_input : std::invalid_argument {
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// Exact enumeration would exceed a declared cap (selectors, ghost samples,
// convolution atoms, subsets). CLI maps these to exit code 3.
struct resource_limit : std::runtime_error {
    explicit resource_limit(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cpb
