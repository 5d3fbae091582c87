#pragma once

#include <stdexcept>
#include <string>

namespace icudo {

// Requested configuration cannot be built (no feasible design, b < d, ...).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration or construction would exceed a size/overflow budget.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (CSV, OA text, design/data mismatch).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace icudo
