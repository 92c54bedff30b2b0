// Acceptance suite: one line per criterion, nonzero exit on any failure.
// --quick shrinks every run for a fast smoke pass; --only N,M runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "erwlab/config.hpp"
#include "erwlab/experiments.hpp"
#include "erwlab/good_events.hpp"
#include "erwlab/heat_kernel.hpp"
#include "erwlab/oracle.hpp"
#include "erwlab/parallel.hpp"
#include "erwlab/return_stats.hpp"
#include "erwlab/rng.hpp"
#include "erwlab/scaling.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/triadic.hpp"
#include "erwlab/walk.hpp"

using namespace erwlab;

namespace {

bool g_quick = false;
int g_workers = 0;  // 0 = all cores
std::uint64_t g_seed = 20240809;

int workers() { return effective_workers(g_workers); }

// ------------------------------------------------------------ criterion 1
// Exact sampler equivalence: counting vs replay path law, per path <= 1e-12,
// m <= 7, alpha in {-1/4, 0, 1/4, 1/2, 3/4}.
bool criterion_1(std::ostream& out) {
    const int m_max = g_quick ? 5 : 7;
    double worst = 0.0;
    for (double alpha : {-0.25, 0.0, 0.25, 0.5, 0.75})
        for (int m = 1; m <= m_max; ++m)
            worst = std::max(
                worst, exact_erw_law(alpha, m).max_abs_difference(exact_replay_law(alpha, m)));
    out << "max per-path gap " << worst << " (tolerance 1e-12)";
    return worst <= 1e-12;
}

// ------------------------------------------------------------ criterion 2
// Change-of-measure identity: |lhs - rhs| <= 1e-10 for total mass and 20
// random events per (alpha, m), m <= 7.
bool criterion_2(std::ostream& out) {
    const int m_max = g_quick ? 5 : 7;
    double worst = 0.0;
    for (double alpha : {-0.25, 0.25, 0.5, 0.75})
        for (int m = 1; m <= m_max; ++m) {
            const RndIdentity total = exact_rnd_identity(alpha, m, {});
            worst = std::max({worst, std::abs(total.gap()), std::abs(total.lhs - 1.0)});
            for (std::uint64_t salt = 0; salt < 20; ++salt)
                worst = std::max(
                    worst, std::abs(exact_rnd_identity(alpha, m, hashed_path_event(salt)).gap()));
        }
    out << "max identity gap " << worst << " (tolerance 1e-10)";
    return worst <= 1e-10;
}

// ------------------------------------------------------------ criterion 3
// Exact count identity at scale: 1e4 walks of 1e6 steps, checkpointed.
bool criterion_3(std::ostream& out) {
    const std::int64_t walks = g_quick ? 200 : 10000;
    const std::int64_t steps = g_quick ? 100000 : 1000000;
    const double alpha = 0.3;
    std::vector<std::int64_t> checkpoints;
    for (std::int64_t c = 1000; c < steps; c *= 10) checkpoints.push_back(c);
    checkpoints.push_back(steps);

    std::vector<unsigned char> ok(static_cast<std::size_t>(walks), 0);
    parallel_for(walks, workers(), [&](std::int64_t w) {
        Xoshiro256pp rng = substream(derive_seed(g_seed, 3), static_cast<std::uint64_t>(w));
        CountingWalker walker(alpha);
        bool exact = true;
        std::size_t next = 0;
        for (std::int64_t k = 1; k <= steps; ++k) {
            walker.step(rng);
            if (next < checkpoints.size() && k == checkpoints[next]) {
                ++next;
                std::int64_t sum4 = 0;
                for (int i = 0; i < 4; ++i) sum4 += walker.centered4(i);
                if (sum4 != 0) exact = false;
            }
        }
        ok[static_cast<std::size_t>(w)] = exact ? 1 : 0;
    });
    std::int64_t good = 0;
    for (auto v : ok) good += v;
    out << good << "/" << walks << " walks exact at every checkpoint (" << checkpoints.size()
        << " checkpoints, " << steps << " steps each)";
    return good == walks;
}

// ------------------------------------------------------------ criterion 4
// Count martingale over SRW windows: mean M_j within 4se of 0 at all
// checkpoints, and E[M^2 stopped] <= (A+A_eps)^2, n = 1e4, 1e5 windows.
bool criterion_4(std::ostream& out) {
    ContiguityConfig cfg;
    cfg.n = g_quick ? 1000 : 10000;
    cfg.epsilon = 0.1;
    cfg.A = 1.0;
    const std::int64_t windows = g_quick ? 5000 : 100000;
    const MartingaleCheckReport rep =
        martingale_window_check(cfg, windows, derive_seed(g_seed, 4), workers());
    double worst_z = 0.0;
    for (std::size_t c = 0; c < rep.checkpoints.size(); ++c)
        if (rep.m_stderr[c] > 0.0)
            worst_z = std::max(worst_z, std::abs(rep.m_mean[c]) / rep.m_stderr[c]);
    out << "windows " << rep.windows << ", worst |mean M_j|/se " << worst_z
        << " (<= 4), E[M_stopped^2] " << rep.stopped_m2_mean << " <= bound " << rep.bound
        << " (A_eps " << rep.a_eps << ")";
    return rep.mean_within_4se && rep.stopped_m2_ok;
}

// ------------------------------------------------------------ criterion 5
// Heat kernel bound: k * max_y p_k(y) bounded and stable within 5% over the
// top octave of k <= 2048.
bool criterion_5(std::ostream& out) {
    const int k_max = g_quick ? 512 : 2048;
    const auto seq = heat_kernel_bound_sequence(k_max);
    const double constant = *std::max_element(seq.begin(), seq.end());
    double lo = seq[static_cast<std::size_t>(k_max / 2 - 1)], hi = lo;
    for (int k = k_max / 2; k <= k_max; ++k) {
        const double v = seq[static_cast<std::size_t>(k - 1)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Running-max stability against halving the range, as a second view.
    double run_half = 0.0, run_full = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        run_full = std::max(run_full, seq[static_cast<std::size_t>(k - 1)]);
        if (k == k_max / 2) run_half = run_full;
    }
    const double octave_ratio = hi / lo;
    const double range_ratio = run_full / run_half;
    out << "C = " << constant << ", top-octave max/min " << octave_ratio
        << " (<= 1.05), C(k_max)/C(k_max/2) " << range_ratio << " (<= 1.05)";
    return std::isfinite(constant) && octave_ratio <= 1.05 && range_ratio <= 1.05;
}

// ------------------------------------------------------------ criterion 6
// Second-moment window-count shape under the SRW: E[N^2]/log n bounded over
// n in {2^8..2^13}, E[N] bounded below, Paley-Zygmund on every cell.
bool criterion_6(std::ostream& out) {
    std::vector<std::int64_t> n_values;
    for (std::int64_t n = 256; n <= (g_quick ? 1024 : 8192); n *= 2) n_values.push_back(n);
    const std::int64_t samples = g_quick ? 20000 : 100000;
    const SecondMomentReport rep =
        second_moment_report(n_values, 1.0, 0.05, samples, derive_seed(g_seed, 6), workers());

    double lower_half_max = 0.0, top_max = 0.0;
    const std::int64_t split = n_values[(n_values.size() - 1) / 2];
    for (const auto& cell : rep.cells) {
        if (cell.n <= split) lower_half_max = std::max(lower_half_max, cell.e_n2_over_log_n);
        if (cell.n == n_values.back()) top_max = std::max(top_max, cell.e_n2_over_log_n);
    }
    const bool ratio_bounded = top_max <= 1.25 * lower_half_max;
    const bool mean_positive = rep.min_e_n >= 0.01;
    out << "cells " << rep.cells.size() << ", max E[N^2]/log n " << rep.max_e_n2_over_log_n
        << " (top " << top_max << " vs lower-half " << lower_half_max << "), min E[N] "
        << rep.min_e_n << " (>= 0.01), Paley-Zygmund "
        << (rep.paley_zygmund_ok ? "ok" : "VIOLATED");
    return ratio_bounded && mean_positive && rep.paley_zygmund_ok;
}

// ------------------------------------------------------------ criterion 7
// Conditional window returns: (log n) * p within a factor-3 band across
// n in {3^5..3^8} for alpha in {0, 0.3}, A = 1.
bool criterion_7(std::ostream& out) {
    const std::vector<std::int64_t> n_values = g_quick
                                                   ? std::vector<std::int64_t>{243, 729}
                                                   : std::vector<std::int64_t>{243, 729, 2187, 6561};
    const std::int64_t trials = g_quick ? 8000 : 40000;
    bool ok = true;
    std::uint64_t stage = 0;
    std::ostringstream detail;
    for (double alpha : {0.0, 0.3}) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::int64_t n : n_values) {
            const auto est = window_return_probability_erw(
                alpha, n, 1.0, trials, derive_seed(g_seed, 700 + stage++), workers());
            lo = std::min(lo, est.logn_scaled);
            hi = std::max(hi, est.logn_scaled);
        }
        detail << " alpha=" << alpha << ": band [" << lo << ", " << hi << "] ratio " << hi / lo
               << ";";
        if (hi > 3.0 * lo) ok = false;
    }
    out << "(log n)*p bands (factor <= 3):" << detail.str();
    return ok;
}

// ------------------------------------------------------------ criterion 8
// Triadic windows at alpha = 0.3: with delta fixed at j = 4, the fraction of
// prefixes with j*P > delta stays >= 0.8 up to j = 8, and the partial sums
// of P-hat grow by at least delta/(2j) per level.
bool criterion_8(std::ostream& out) {
    const double alpha = 0.3;
    const int j_max = g_quick ? 5 : 8;
    const int delta_j = 4;
    const std::int64_t prefixes = g_quick ? 120 : 400;
    const std::int64_t r0 = g_quick ? 200 : 400;
    const std::int64_t r_cap = g_quick ? 1000 : 4000;

    const DyadicReturnRecord pilot =
        triadic_window_scan(alpha, delta_j, prefixes, r0, derive_seed(g_seed, 800), workers());
    const DivergenceReport pilot_rep = cumulative_return_divergence({&pilot, 1}, delta_j);
    const double delta = std::max(pilot_rep.delta, 1e-6);

    std::vector<DyadicReturnRecord> records;
    for (int j = 1; j <= j_max; ++j) {
        const auto resolve =
            static_cast<std::int64_t>(std::ceil(30.0 * static_cast<double>(j) / delta));
        records.push_back(
            triadic_window_scan(alpha, j, prefixes, std::max(r0, std::min(r_cap, resolve)),
                                derive_seed(g_seed, 810 + static_cast<std::uint64_t>(j)),
                                workers()));
    }
    const DivergenceReport rep = cumulative_return_divergence(records, delta_j);

    bool frac_ok = true;
    double worst_frac = 1.0;
    for (std::size_t i = 0; i < rep.js.size(); ++i)
        if (rep.js[i] >= delta_j) {
            worst_frac = std::min(worst_frac, rep.frac_above_delta[i]);
            if (rep.frac_above_delta[i] < 0.8) frac_ok = false;
        }
    out << "delta " << rep.delta << " (at j=" << delta_j << "), min frac(j*P > delta) for j>="
        << delta_j << ": " << worst_frac << " (>= 0.8), partial sum at j=" << j_max << ": "
        << rep.partial_sums.back() << ", increments "
        << (rep.increments_ok ? "all >= delta/(2j)" : "TOO SMALL");
    return frac_ok && rep.increments_ok;
}

// ------------------------------------------------------------ criterion 9
// Phase transition: fitted MSD exponent 1.00 +- 0.1 for alpha in {0, 0.25},
// >= 1.3 for alpha = 0.75; 1e4 walks per cell, n up to 1e5.
bool criterion_9(std::ostream& out) {
    ScalingSweepConfig cfg;
    cfg.alphas = {0.0, 0.25, 0.75};
    const double n_max = g_quick ? 10000.0 : 100000.0;
    for (int i = 0; i < 10; ++i) {
        const auto v = static_cast<std::int64_t>(
            std::llround(std::exp(std::log(100.0) +
                                  (std::log(n_max) - std::log(100.0)) * static_cast<double>(i) / 9.0)));
        if (cfg.n_grid.empty() || v > cfg.n_grid.back()) cfg.n_grid.push_back(v);
    }
    cfg.walks_per_cell = g_quick ? 2000 : 10000;
    cfg.seed = derive_seed(g_seed, 9);
    cfg.workers = workers();
    const MomentCurve curve = msd_sweep(cfg);
    const double s0 = fit_scaling_exponent(curve, 0.0);
    const double s25 = fit_scaling_exponent(curve, 0.25);
    const double s75 = fit_scaling_exponent(curve, 0.75);
    out << "exponents: alpha=0 -> " << s0 << ", alpha=0.25 -> " << s25
        << " (both 1.00 +- 0.1), alpha=0.75 -> " << s75 << " (>= 1.3)";
    return std::abs(s0 - 1.0) <= 0.1 && std::abs(s25 - 1.0) <= 0.1 && s75 >= 1.3;
}

// ----------------------------------------------------------- criterion 10
// Count-fluctuation stability: KS(D_n(e_1)/sqrt(n) at n vs 2n) below the 1%
// critical value for alpha = 0.25 (n = 1e4, 1e4 walks each); the alpha =
// 0.75 statistic normalized by n^alpha is reported without assertion.
bool criterion_10(std::ostream& out) {
    const std::int64_t n = g_quick ? 4096 : 10000;
    const std::int64_t each = g_quick ? 3000 : 10000;
    const KsStabilityReport diffusive =
        count_limit_stability(0.25, n, each, 0.5, derive_seed(g_seed, 10), workers());
    const KsStabilityReport super =
        count_limit_stability(0.75, n, each, 0.75, derive_seed(g_seed, 11), workers());
    out << "alpha=0.25: KS " << diffusive.ks << " vs 1% critical " << diffusive.critical_1pct
        << "; alpha=0.75 (reported only): KS " << super.ks;
    return diffusive.below_critical;
}

// ----------------------------------------------------------- criterion 11
// Reproducibility: identical config and seed give byte-identical CSV bodies
// regardless of worker count.
std::string csv_body_of(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string line, body;
    while (std::getline(in, line))
        if (line.empty() || line.front() != '#') body += line + "\n";
    return body;
}

bool criterion_11(std::ostream& out) {
    const auto base = std::filesystem::temp_directory_path() / "erwlab_acceptance";
    std::filesystem::remove_all(base);

    const auto make_scaling = [&](const std::filesystem::path& dir, int w) {
        ExperimentConfig cfg;
        cfg.experiment = "scaling";
        cfg.master_seed = g_seed;
        cfg.output_dir = dir;
        cfg.workers = w;
        cfg.params["alphas"] = "0,0.3";
        cfg.params["n_list"] = "32,64,128,256";
        cfg.params["walks_per_cell"] = "500";
        cfg.params["ks_alphas"] = "0.3";
        cfg.params["ks_n"] = "512";
        cfg.params["ks_walks"] = "400";
        return cfg;
    };
    const auto make_recurrence = [&](const std::filesystem::path& dir, int w) {
        ExperimentConfig cfg;
        cfg.experiment = "recurrence";
        cfg.master_seed = g_seed + 1;
        cfg.output_dir = dir;
        cfg.workers = w;
        cfg.params["mode"] = "returns";
        cfg.params["n_list"] = "81,243";
        cfg.params["trials"] = "3000";
        cfg.params["dp_check_max_n"] = "0";
        return cfg;
    };

    int compared = 0;
    bool identical = true;
    const std::vector<
        std::pair<std::string, std::function<ExperimentConfig(const std::filesystem::path&, int)>>>
        makers = {{"scaling", make_scaling}, {"recurrence", make_recurrence}};
    for (const auto& [label, make] : makers) {
        const auto d1 = base / (label + "_w1");
        const auto d4 = base / (label + "_w4");
        const RunManifest m1 = run(make(d1, 1));
        const RunManifest m4 = run(make(d4, 4));
        if (m1.outputs != m4.outputs) identical = false;
        for (const auto& name : m1.outputs) {
            if (name.find(".csv") == std::string::npos) continue;
            ++compared;
            if (csv_body_of(d1 / name) != csv_body_of(d4 / name)) {
                identical = false;
                out << " MISMATCH in " << label << "/" << name << ";";
            }
        }
    }
    out << "compared " << compared << " CSV bodies across worker counts 1 and 4: "
        << (identical ? "byte-identical" : "DIFFER");
    std::filesystem::remove_all(base);
    return identical;
}

struct Criterion {
    int id;
    const char* name;
    bool (*fn)(std::ostream&);
};

const Criterion kCriteria[] = {
    {1, "exact sampler equivalence", criterion_1},
    {2, "change-of-measure identity", criterion_2},
    {3, "exact count identity at scale", criterion_3},
    {4, "window martingale checks", criterion_4},
    {5, "heat kernel bound constant", criterion_5},
    {6, "second-moment window counts", criterion_6},
    {7, "conditional window returns", criterion_7},
    {8, "triadic return divergence", criterion_8},
    {9, "phase transition exponents", criterion_9},
    {10, "count-fluctuation stability", criterion_10},
    {11, "reproducibility across workers", criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            g_quick = true;
        } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
            g_workers = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            g_seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) only.insert(std::atoi(tok.c_str()));
        } else {
            std::cerr << "usage: acceptance [--quick] [--only N,M] [--workers N] [--seed S]\n";
            return 2;
        }
    }

    int failures = 0;
    for (const auto& criterion : kCriteria) {
        if (!only.empty() && !only.count(criterion.id)) continue;
        std::ostringstream detail;
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        try {
            pass = criterion.fn(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("CRITERION %2d (%s): %s [%.1fs] %s\n", criterion.id, criterion.name,
                    pass ? "PASS" : "FAIL", secs, detail.str().c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures == 0)
        std::printf("ACCEPTANCE: all criteria passed\n");
    else
        std::printf("ACCEPTANCE: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
