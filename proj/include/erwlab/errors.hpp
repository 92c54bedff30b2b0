#pragma once

#include <stdexcept>
#include <string>

namespace erwlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A factor of the window likelihood ratio came out <= 0. Factors are
// strictly positive for any reachable count state and any memory parameter
// in the open range, so this signals corrupted state or an out-of-range
// parameter fed past validation.
struct NonpositiveFactor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientConditioningSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownPlot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace erwlab
