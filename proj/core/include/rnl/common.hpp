#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rnl {

using Vec64 = std::vector<double>;

// Thrown when operand shapes do not line up.
struct DimError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a computation produces or receives a non-finite value, or an
// iteration fails to converge. NaN is never propagated silently.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis-aligned box in R^n. lo < hi componentwise.
struct Box {
    Vec64 lo;
    Vec64 hi;

    std::size_t dim() const { return lo.size(); }
};

} // namespace rnl
