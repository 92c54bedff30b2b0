#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace erwlab {

// Legal memory-parameter range for the planar walk: the open interval
// (-1/3, 1). The endpoints are rejected everywhere except in the p <-> alpha
// conversion, which maps the closed p-range [0,1] onto the closed
// alpha-range.
inline constexpr double kAlphaMin = -1.0 / 3.0;
inline constexpr double kAlphaMax = 1.0;

inline bool alpha_in_range(double alpha) {
    return alpha > kAlphaMin && alpha < kAlphaMax;
}

inline void require_alpha(double alpha) {
    if (!alpha_in_range(alpha))
        throw std::invalid_argument("memory parameter alpha=" + std::to_string(alpha) +
                                    " outside (-1/3, 1)");
}

// alpha = (4p - 1)/3 for the replay formulation with repeat probability p.
inline double memory_param_to_alpha(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("memory parameter p=" + std::to_string(p) +
                                    " outside [0, 1]");
    return (4.0 * p - 1.0) / 3.0;
}

inline double alpha_to_memory_param(double alpha) {
    return (3.0 * alpha + 1.0) / 4.0;
}

// Counting: O(1) state, draws straight from the reinforced step law.
// Replay: keeps the full step history and re-draws a uniform past step;
// same path law, used as a cross-check and capped in memory.
enum class Sampler {
    Counting,
    Replay,
};

inline const char* sampler_name(Sampler s) {
    return s == Sampler::Counting ? "counting" : "replay";
}

struct WalkParams {
    double alpha = 0.0;
    Sampler sampler = Sampler::Counting;
    std::uint64_t seed = 0;
    std::uint64_t walker_id = 0;

    void validate() const { require_alpha(alpha); }
};

}  // namespace erwlab
