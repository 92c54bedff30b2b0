#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "erwlab/lattice.hpp"
#include "erwlab/reweighting.hpp"

namespace erwlab {

// Smallest bound a such that the sup event
//   G_n = { max_i sup_{0<=k<=n} |D_k^{window}(e_i)| <= a*sqrt(n) }
// has empirical probability >= 1 - epsilon + one binomial standard error,
// estimated over n_samples simple-random-walk windows.
double calibrate_a_eps(std::int64_t n, double epsilon, std::int64_t n_samples,
                       std::uint64_t seed, int workers = 1);

struct GoodEventReport {
    double p_g = 0.0, p_g_stderr = 0.0;
    double p_h = 0.0, p_h_stderr = 0.0;
    double p_e = 0.0, p_e_stderr = 0.0;  // E = G and H
    double c_lower = 0.0;                // contiguity constant for the given alpha
    double a_eps = 0.0;
    std::int64_t trials = 0;    // prefix draws
    std::int64_t accepted = 0;  // prefixes passing |D_n(e_i)| <= A*sqrt(n)
};

// Simulates SRW prefix+window pairs, keeps the prefixes inside the
// conditioning ball, and measures the good events on the windows. If
// cfg.A_eps <= 0 the bound is calibrated first on an independent substream.
GoodEventReport estimate_good_events(const ContiguityConfig& cfg, double alpha,
                                     std::int64_t n_samples, std::uint64_t seed,
                                     int workers = 1);

struct MartingaleCheckReport {
    std::vector<std::int64_t> checkpoints;
    std::vector<double> m_mean;    // mean of M_j per checkpoint
    std::vector<double> m_stderr;  // standard error per checkpoint
    double stopped_m2_mean = 0.0;  // E[M_{n ^ theta}^2]
    double stopped_m2_stderr = 0.0;
    double stopped_qv_mean = 0.0;  // E[sum of stopped QV increments]
    double stopped_qv_stderr = 0.0;
    double bound = 0.0;  // (A + A_eps)^2
    double a_eps = 0.0;
    std::int64_t windows = 0;
    std::int64_t trials = 0;
    bool mean_within_4se = true;
    bool stopped_m2_ok = true;
};

// Martingale diagnostics of the count martingale over SRW windows: the
// empirical mean of M_j at evenly spaced checkpoints, the stopped second
// moment against (A+A_eps)^2, and the stopped quadratic variation.
MartingaleCheckReport martingale_window_check(const ContiguityConfig& cfg,
                                              std::int64_t n_windows, std::uint64_t seed,
                                              int workers = 1);

// Window statistic: nonnegative function of the recentered window steps.
struct WindowStatistic {
    std::string name;
    std::function<double(std::span<const Direction>)> eval;
};

WindowStatistic window_returns_to_start_statistic();
WindowStatistic window_ends_near_start_statistic(double radius_over_sqrt_n, std::int64_t n);
WindowStatistic constant_one_statistic();

struct ContiguityBoundReport {
    double lhs = 0.0, lhs_stderr = 0.0;          // reinforced side, conditioned
    double rhs_raw = 0.0, rhs_raw_stderr = 0.0;  // SRW expectation (before the constant)
    double c_lower = 0.0;
    double a_eps = 0.0;
    double margin = 0.0;  // lhs - (c*rhs - 4*combined stderr)
    bool holds = false;
    std::int64_t prefix_trials = 0;
    std::int64_t prefixes_used = 0;
    std::int64_t continuations_per_prefix = 0;
    std::int64_t srw_windows_per_prefix = 0;
};

// Estimates both sides of the window lower bound
//   E_erw[f(window) 1_E | F_n, |D_n| <= A sqrt(n)] >= c * E_srw[f(window) 1_E]
// by rejection-sampled reinforced prefixes and per-prefix window resampling.
// Throws InsufficientConditioningSamples if fewer than 100 prefixes pass.
ContiguityBoundReport verify_contiguity_bound(const ContiguityConfig& cfg, double alpha,
                                              const WindowStatistic& statistic,
                                              std::int64_t prefix_trials,
                                              std::int64_t continuations_per_prefix,
                                              std::int64_t srw_windows_per_prefix,
                                              std::uint64_t seed, int workers = 1);

}  // namespace erwlab
