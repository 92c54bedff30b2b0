#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "erwlab/estimate.hpp"

namespace erwlab {

// Conditional window-return estimate for the reinforced walk: the prefix is
// conditioned by rejection on max_i |D_n(e_i)| <= A*sqrt(n), then continued
// through the window [ceil(5n/2), 3n]; a hit is a visit to the origin at any
// window time.
struct WindowReturnEstimate {
    double alpha = 0.0;
    std::int64_t n = 0;
    double A = 0.0;
    std::int64_t window_begin = 0;  // ceil(5n/2)
    std::int64_t window_end = 0;    // 3n
    double p_hat = 0.0;
    double std_error = 0.0;
    double logn_scaled = 0.0;  // log(n) * p_hat
    std::int64_t accepted = 0;
    std::int64_t trials = 0;
};

// `trials` prefixes are attempted; throws InsufficientConditioningSamples if
// fewer than 100 pass the count bound. Pass A <= 0 for an unconditioned run.
WindowReturnEstimate window_return_probability_erw(double alpha, std::int64_t n, double A,
                                                   std::int64_t trials, std::uint64_t seed,
                                                   int workers = 1);

// Per-prefix inner estimate of the conditional hit probability
// P(exists 3^j <= k <= 3^{j+1} : X_k = 0 | F_{3^j}).
struct TriadicPrefixRecord {
    std::int64_t prefix_id = 0;
    std::int64_t hit_count = 0;
    std::int64_t trials = 0;
    double p_hat_inner = 0.0;
};

struct DyadicReturnRecord {
    int j = 0;
    std::int64_t window_begin = 0;  // 3^j
    std::int64_t window_end = 0;    // 3^{j+1}
    std::vector<TriadicPrefixRecord> prefixes;
    double p_mean = 0.0;  // mean of p_hat_inner over prefixes
};

inline constexpr int kMaxTriadicLevel = 10;

// Two-level estimate at one triadic level: n_prefixes reinforced walks run
// to 3^j, then `continuations` resampled continuations per prefix (the count
// vector and position are a sufficient statistic for the conditional law).
DyadicReturnRecord triadic_window_scan(double alpha, int j, std::int64_t n_prefixes,
                                       std::int64_t continuations, std::uint64_t seed,
                                       int workers = 1);

struct DivergenceReport {
    double delta = 0.0;  // threshold, held fixed across levels
    int delta_j = 0;     // level whose 5th percentile of j*p defined delta
    std::vector<int> js;
    std::vector<double> p_means;           // P-hat_{3^j}
    std::vector<double> partial_sums;      // running sum of p_means
    std::vector<double> frac_above_delta;  // P-hat(j * P_{3^j} > delta)
    std::vector<double> required_increment;  // delta / (2j)
    bool increments_ok = true;  // every p_mean >= delta/(2j)
};

// Aggregates scan records: chooses delta as the empirical 5th percentile of
// j * p_hat_inner at level delta_j (default: the smallest level present),
// then reports partial sums and threshold exceedance fractions per level.
DivergenceReport cumulative_return_divergence(std::span<const DyadicReturnRecord> records,
                                              int delta_j = -1);

}  // namespace erwlab
