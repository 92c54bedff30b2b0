#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include "erwlab/heat_kernel.hpp"
#include "erwlab/lattice.hpp"

namespace erwlab {

// Deterministic event of a fixed-length step sequence. Same trajectory,
// same verdict; anything stateful would wreck reproducibility.
struct EventPredicate {
    std::string name;
    std::function<bool(std::span<const Direction>)> test;
    double target_probability = std::numeric_limits<double>::quiet_NaN();
};

EventPredicate always_true_event();
EventPredicate always_false_event();

// max_i sup_{0<=k<=n} |D_k(e_i)| <= bound, evaluated in integers as
// 4|D| <= 4*bound.
EventPredicate count_sup_within(double bound);

struct RestrictedKernel {
    PackedLatticeTable values;  // sub-probability kernel at time k
    double event_probability = 0.0;
    double event_std_error = 0.0;
    std::int64_t samples = 0;
};

// Monte Carlo estimate of E[1{X_k = y} 1{path in event}] for a length-n
// simple random walk; the unrestricted kernel is exact DP, the restricted
// one is sampled because predicates are arbitrary path functions.
RestrictedKernel restricted_kernel(int k, int n, const EventPredicate& predicate,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   int workers = 1);

struct L1Deficits {
    double kernel_deficit = 0.0;  // sum_y p_n(y) - p_n^E(y)
    double green_deficit = 0.0;   // sum_y g(y) - g^E(y) over the window [ceil(n/2), n]
    double event_probability = 0.0;
    double event_std_error = 0.0;
    int window_length = 0;
    std::int64_t samples = 0;
};

L1Deficits l1_deficits(int n, const EventPredicate& predicate, std::int64_t n_samples,
                       std::uint64_t seed, int workers = 1);

}  // namespace erwlab
