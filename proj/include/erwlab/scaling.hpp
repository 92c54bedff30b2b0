#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "erwlab/estimate.hpp"

namespace erwlab {

struct ScalingSweepConfig {
    std::vector<double> alphas;
    std::vector<std::int64_t> n_grid;  // strictly increasing horizons
    std::int64_t walks_per_cell = 0;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

struct MomentCell {
    double alpha = 0.0;
    std::int64_t n = 0;
    double mean_msd = 0.0;  // mean of ||X_n||^2
    double msd_stderr = 0.0;
    std::array<double, 4> d_mean{};  // mean of D_n(e_i)/sqrt(n)
    double d1_var = 0.0;             // variance of D_n(e_1)/sqrt(n)
    std::int64_t samples = 0;
};

struct MomentCurve {
    std::vector<MomentCell> cells;
};

// Independent walks per (alpha, n) cell; every walk checks the exact
// sum-zero count identity as it goes.
MomentCurve msd_sweep(const ScalingSweepConfig& cfg);

// OLS slope of log E||X_n||^2 against log n over the top half of the grid
// for one alpha. Throws DegenerateGrid below 4 grid points.
double fit_scaling_exponent(const MomentCurve& curve, double alpha);

struct KsStabilityReport {
    double alpha = 0.0;
    std::int64_t n = 0;  // compared against 2n
    double exponent = 0.5;  // normalization D_n(e_1)/n^exponent
    double ks = 0.0;
    double critical_1pct = 0.0;
    bool below_critical = false;
    std::int64_t samples_each = 0;
};

// Two-sample KS distance between the laws of D_n(e_1)/n^exponent at n and
// 2n. In the diffusive range the natural exponent is 1/2; callers pass
// alpha itself above the transition, where the check is report-only.
KsStabilityReport count_limit_stability(double alpha, std::int64_t n, std::int64_t walks,
                                        double exponent, std::uint64_t seed, int workers = 1);

// P(max_i |D_n(e_i)| <= A*sqrt(n)) under the reinforced walk.
EstimateResult conditioning_mass(double alpha, std::int64_t n, double A, std::int64_t walks,
                                 std::uint64_t seed, int workers = 1);

}  // namespace erwlab
