#include "erwlab/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include "erwlab/errors.hpp"
#include "erwlab/parallel.hpp"
#include "erwlab/rng.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

void ScalingSweepConfig::validate() const {
    if (alphas.empty() || n_grid.empty()) throw std::invalid_argument("empty sweep grid");
    for (double a : alphas) require_alpha(a);
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
        if (n_grid[i] >= n_grid[i + 1])
            throw std::invalid_argument("horizon grid must be strictly increasing");
    if (n_grid.front() < 1) throw std::invalid_argument("horizons must be >= 1");
    if (walks_per_cell < 2) throw std::invalid_argument("walks_per_cell >= 2 required");
}

namespace {

struct WalkSummary {
    double msd = 0.0;
    std::array<double, 4> d_scaled{};
};

}  // namespace

MomentCurve msd_sweep(const ScalingSweepConfig& cfg) {
    cfg.validate();
    MomentCurve curve;
    std::uint64_t cell_index = 0;
    for (double alpha : cfg.alphas) {
        for (std::int64_t n : cfg.n_grid) {
            const std::uint64_t cell_seed = derive_seed(cfg.seed, cell_index++);
            const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
            std::vector<WalkSummary> summaries(static_cast<std::size_t>(cfg.walks_per_cell));
            parallel_for_chunks(cfg.walks_per_cell, cfg.workers, 4,
                                [&](std::int64_t begin, std::int64_t end) {
                for (std::int64_t w = begin; w < end; ++w) {
                    Xoshiro256pp rng = substream(cell_seed, static_cast<std::uint64_t>(w));
                    CountingWalker walker(alpha);
                    for (std::int64_t k = 0; k < n; ++k) walker.step(rng);
                    std::int64_t c4_sum = 0;
                    auto& out = summaries[static_cast<std::size_t>(w)];
                    for (int i = 0; i < 4; ++i) {
                        const std::int64_t c4 = walker.centered4(i);
                        c4_sum += c4;
                        out.d_scaled[static_cast<std::size_t>(i)] =
                            0.25 * static_cast<double>(c4) * inv_sqrt_n;
                    }
                    if (c4_sum != 0)
                        throw std::logic_error("count identity violated");  // unreachable
                    out.msd = static_cast<double>(walker.position().norm2_sq());
                }
            });
            RunningMoments msd, d1;
            std::array<RunningMoments, 4> d;
            for (const auto& s : summaries) {
                msd.add(s.msd);
                for (int i = 0; i < 4; ++i) d[static_cast<std::size_t>(i)].add(s.d_scaled[static_cast<std::size_t>(i)]);
                d1.add(s.d_scaled[0]);
            }
            MomentCell cell;
            cell.alpha = alpha;
            cell.n = n;
            cell.mean_msd = msd.mean();
            cell.msd_stderr = msd.std_error();
            for (int i = 0; i < 4; ++i) cell.d_mean[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)].mean();
            cell.d1_var = d1.variance();
            cell.samples = cfg.walks_per_cell;
            curve.cells.push_back(cell);
        }
    }
    return curve;
}

double fit_scaling_exponent(const MomentCurve& curve, double alpha) {
    std::vector<double> log_n, log_msd;
    for (const auto& cell : curve.cells) {
        if (cell.alpha != alpha) continue;
        log_n.push_back(std::log(static_cast<double>(cell.n)));
        log_msd.push_back(std::log(cell.mean_msd));
    }
    if (log_n.size() < 4)
        throw DegenerateGrid("scaling fit needs at least 4 grid points, have " +
                             std::to_string(log_n.size()));
    const std::size_t start = log_n.size() / 2;  // top half only
    return ols_slope(std::span(log_n).subspan(start), std::span(log_msd).subspan(start));
}

KsStabilityReport count_limit_stability(double alpha, std::int64_t n, std::int64_t walks,
                                        double exponent, std::uint64_t seed, int workers) {
    require_alpha(alpha);
    if (n < 1 || walks < 8) throw std::invalid_argument("ks stability: bad sample plan");

    const auto sample_d1 = [&](std::int64_t horizon, std::uint64_t stage) {
        std::vector<double> values(static_cast<std::size_t>(walks));
        const double scale = 1.0 / std::pow(static_cast<double>(horizon), exponent);
        parallel_for_chunks(walks, workers, 4, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t w = begin; w < end; ++w) {
                Xoshiro256pp rng = substream(derive_seed(seed, stage), static_cast<std::uint64_t>(w));
                CountingWalker walker(alpha);
                for (std::int64_t k = 0; k < horizon; ++k) walker.step(rng);
                values[static_cast<std::size_t>(w)] =
                    0.25 * static_cast<double>(walker.centered4(0)) * scale;
            }
        });
        return values;
    };

    KsStabilityReport rep;
    rep.alpha = alpha;
    rep.n = n;
    rep.exponent = exponent;
    rep.samples_each = walks;
    rep.ks = ks_distance(sample_d1(n, 1), sample_d1(2 * n, 2));
    rep.critical_1pct = ks_critical_value(0.01, walks, walks);
    rep.below_critical = rep.ks < rep.critical_1pct;
    return rep;
}

EstimateResult conditioning_mass(double alpha, std::int64_t n, double A, std::int64_t walks,
                                 std::uint64_t seed, int workers) {
    require_alpha(alpha);
    if (n < 1 || walks < 1) throw std::invalid_argument("conditioning_mass: bad sample plan");
    const double accept4 = 4.0 * A * std::sqrt(static_cast<double>(n));
    std::vector<unsigned char> inside(static_cast<std::size_t>(walks), 0);
    parallel_for_chunks(walks, workers, 4, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            CountingWalker walker(alpha);
            for (std::int64_t k = 0; k < n; ++k) walker.step(rng);
            bool ok = true;
            for (int i = 0; i < 4; ++i)
                if (std::abs(static_cast<double>(walker.centered4(i))) > accept4) ok = false;
            inside[static_cast<std::size_t>(w)] = ok ? 1 : 0;
        }
    });
    std::int64_t hits = 0;
    for (auto v : inside) hits += v;
    return binomial_estimate(hits, walks, seed);
}

}  // namespace erwlab
