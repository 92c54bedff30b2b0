#pragma once

#include <cstdint>
#include <vector>

#include "erwlab/lattice.hpp"
#include "erwlab/restricted.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

// Configuration of the window visit count
//   N = #{ ceil(3n/2) <= k <= 2n : X_k = -x_n } * 1{first half in E} * 1{second half in E}.
struct ReturnCountConfig {
    std::int64_t n = 0;
    LatticePoint x_n;          // target offset, expected ||x_n|| <= A sqrt(n)
    EventPredicate predicate;  // applied to both length-n halves

    std::int64_t window_begin() const { return (3 * n + 1) / 2; }  // ceil(3n/2)
    std::int64_t window_end() const { return 2 * n; }
};

// Exact recount on a stored trajectory (length >= 2n).
std::int64_t return_count_statistic(const Trajectory& traj, const ReturnCountConfig& cfg);

struct SecondMomentCell {
    std::int64_t n = 0;
    LatticePoint x;
    double e_n = 0.0, e_n_stderr = 0.0;    // sample mean of N
    double e_n2 = 0.0, e_n2_stderr = 0.0;  // sample mean of N^2
    double p_pos = 0.0, p_pos_stderr = 0.0;  // P(N > 0)
    double pz_lower = 0.0;                   // E[N]^2 / E[N^2], 0 when undefined
    double e_n2_over_log_n = 0.0;
    std::int64_t samples = 0;
};

// One SRW sample of length 2n serves every target simultaneously.
std::vector<SecondMomentCell> second_moment_cells(std::int64_t n,
                                                  const std::vector<LatticePoint>& targets,
                                                  const EventPredicate& predicate,
                                                  std::int64_t n_samples, std::uint64_t seed,
                                                  int workers = 1);

struct SecondMomentReport {
    std::vector<SecondMomentCell> cells;
    double max_e_n2_over_log_n = 0.0;
    double min_e_n = 0.0;  // over all cells; the empirical c_A/2 analogue
    bool paley_zygmund_ok = true;  // P(N>0) >= E[N]^2/E[N^2] - 4se on every cell
    double epsilon = 0.0;          // calibration level of the predicate
};

// Sweeps scales n (targets on a grid ||x|| <= A sqrt(n); the sup-bound
// predicate is calibrated per scale at level epsilon).
SecondMomentReport second_moment_report(const std::vector<std::int64_t>& n_values, double A,
                                        double epsilon, std::int64_t n_samples,
                                        std::uint64_t seed, int workers = 1);

// Grid of targets within the closed ball ||x|| <= radius: origin plus
// points at radius and radius/2 along the axes and the diagonal.
std::vector<LatticePoint> target_grid(double radius);

// Exact SRW quantities for cross-checks, all by dynamic programming:
// expected window visits E[#{wbegin <= k <= wend : X_k = y}] = sum p_k(y).
double srw_expected_window_visits(std::int64_t wbegin, std::int64_t wend, LatticePoint y,
                                  int cap = kDefaultKernelCap);

// Exact P( exists wbegin <= k <= wend : X_k = 0 | max_i |D_n(e_i)| <= A sqrt(n) )
// for the simple random walk: the count vector at time n is Multinomial(n, 1/4),
// the conditioned position distribution follows by enumeration, and the hit
// probability from each start is a backward absorption sweep.
double srw_conditional_window_return(std::int64_t n, double A, std::int64_t wbegin,
                                     std::int64_t wend);

}  // namespace erwlab
