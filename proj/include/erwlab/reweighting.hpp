#pragma once

#include <cstdint>
#include <vector>

#include "erwlab/counts.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

// Per-window reweighting record for the window [n, 2n): the log likelihood
// ratio of the reinforced law against the uniform law, the count martingale
// path M_0..M_n, and its conditional quadratic-variation increments.
struct WindowReweighting {
    std::int64_t n = 0;
    double log_rnd = 0.0;
    std::vector<double> m_path;   // n+1 values, M_0 = 0
    std::vector<double> qv_path;  // n increments
    DirectionCounts d_at_n;
};

// Conditional quadratic-variation increment of the count martingale at the
// state `counts` (step count k >= 1): (1/4) * sum_i D_k(e_i)^2 / k^2.
double martingale_qv_increment(const DirectionCounts& counts);

// Likelihood ratio of a window of length n given the count snapshot at the
// window start. Factor k (0-based within the window) is
//   1 + 4*alpha * D_{n+k}(step) / (n+k),
// evaluated on the counts *before* the step is applied, with
// D_{n+k} = D_n + D_k^{window}. Accumulated as compensated log1p sums.
// Throws NonpositiveFactor if any factor fails to be > 0, which cannot
// happen for in-range alpha and consistent counts.
WindowReweighting window_rnd(const Trajectory& window, const DirectionCounts& d_at_n,
                             double alpha, std::int64_t n);

// First window time j >= 1 at which max_i sup_{0<=k<=j} |D_k^{window}(e_i)|
// exceeds a_eps * sqrt(n); n if the bound is never exceeded (so the return
// value equals n exactly when the sup-bound event holds).
std::int64_t stopping_time_theta(const Trajectory& window, double a_eps, std::int64_t n);

struct ContiguityConfig {
    double epsilon = 0.1;  // event-probability slack, in (0,1)
    double A = 1.0;        // conditioning bound on |D_n(e_i)| / sqrt(n)
    double A_eps = 0.0;    // sup bound on the window counting process; calibrated if <= 0
    std::int64_t n = 0;    // window parameter

    void validate() const;
};

// Explicit lower-bound constant exp(-4a(A+A_eps)/sqrt(eps) - (4a)^2 (A+A_eps)^2).
double contiguity_constant(const ContiguityConfig& cfg, double alpha);

}  // namespace erwlab
