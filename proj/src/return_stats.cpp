#include "erwlab/return_stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "erwlab/errors.hpp"
#include "erwlab/estimate.hpp"
#include "erwlab/good_events.hpp"
#include "erwlab/heat_kernel.hpp"
#include "erwlab/parallel.hpp"
#include "erwlab/rng.hpp"

namespace erwlab {

std::int64_t return_count_statistic(const Trajectory& traj, const ReturnCountConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("return count config needs n >= 1");
    const auto need = static_cast<std::size_t>(2 * cfg.n);
    if (traj.length() < need)
        throw std::invalid_argument("trajectory shorter than 2n");
    const auto steps = traj.step_span();
    const auto half = static_cast<std::size_t>(cfg.n);
    if (!cfg.predicate.test(steps.subspan(0, half)) ||
        !cfg.predicate.test(steps.subspan(half, half)))
        return 0;
    const LatticePoint target{-cfg.x_n.x, -cfg.x_n.y};
    LatticePoint pos = traj.origin();
    std::int64_t count = 0;
    const std::int64_t wbegin = cfg.window_begin();
    const std::int64_t wend = cfg.window_end();
    for (std::int64_t k = 1; k <= wend; ++k) {
        pos.move(steps[static_cast<std::size_t>(k - 1)]);
        if (k >= wbegin && pos == target) ++count;
    }
    return count;
}

std::vector<SecondMomentCell> second_moment_cells(std::int64_t n,
                                                  const std::vector<LatticePoint>& targets,
                                                  const EventPredicate& predicate,
                                                  std::int64_t n_samples, std::uint64_t seed,
                                                  int workers) {
    if (n < 1) throw std::invalid_argument("second_moment_cells: n >= 1");
    if (targets.empty()) throw std::invalid_argument("second_moment_cells: no targets");
    const auto n_targets = targets.size();
    const std::int64_t wbegin = (3 * n + 1) / 2;

    // Per-sample visit counts, reduced in sample order afterwards.
    std::vector<std::uint16_t> visits(static_cast<std::size_t>(n_samples) * n_targets, 0);
    std::vector<unsigned char> both_ok(static_cast<std::size_t>(n_samples), 0);

    parallel_for_chunks(n_samples, workers, 16, [&](std::int64_t begin, std::int64_t end) {
        std::vector<Direction> steps(static_cast<std::size_t>(2 * n));
        std::vector<LatticePoint> negated(n_targets);
        for (std::size_t t = 0; t < n_targets; ++t)
            negated[t] = {-targets[t].x, -targets[t].y};
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            SrwWalker walker;
            auto* row = &visits[static_cast<std::size_t>(w) * n_targets];
            for (std::int64_t k = 1; k <= 2 * n; ++k) {
                const Direction d = walker.step(rng);
                steps[static_cast<std::size_t>(k - 1)] = d;
                if (k >= wbegin) {
                    const LatticePoint pos = walker.position();
                    for (std::size_t t = 0; t < n_targets; ++t)
                        if (pos == negated[t]) ++row[t];
                }
            }
            const std::span<const Direction> all(steps);
            const auto half = static_cast<std::size_t>(n);
            both_ok[static_cast<std::size_t>(w)] =
                (predicate.test(all.subspan(0, half)) && predicate.test(all.subspan(half, half)))
                    ? 1
                    : 0;
        }
    });

    const double logn = std::log(static_cast<double>(n));
    std::vector<SecondMomentCell> cells(n_targets);
    for (std::size_t t = 0; t < n_targets; ++t) {
        RunningMoments mn, mn2, pos;
        for (std::int64_t w = 0; w < n_samples; ++w) {
            const double nv = both_ok[static_cast<std::size_t>(w)]
                                  ? static_cast<double>(visits[static_cast<std::size_t>(w) * n_targets + t])
                                  : 0.0;
            mn.add(nv);
            mn2.add(nv * nv);
            pos.add(nv > 0.0 ? 1.0 : 0.0);
        }
        auto& cell = cells[t];
        cell.n = n;
        cell.x = targets[t];
        cell.e_n = mn.mean();
        cell.e_n_stderr = mn.std_error();
        cell.e_n2 = mn2.mean();
        cell.e_n2_stderr = mn2.std_error();
        cell.p_pos = pos.mean();
        cell.p_pos_stderr = pos.std_error();
        cell.pz_lower = cell.e_n2 > 0.0 ? cell.e_n * cell.e_n / cell.e_n2 : 0.0;
        cell.e_n2_over_log_n = logn > 0.0 ? cell.e_n2 / logn : cell.e_n2;
        cell.samples = n_samples;
    }
    return cells;
}

std::vector<LatticePoint> target_grid(double radius) {
    std::vector<LatticePoint> grid{{0, 0}};
    const auto push_unique = [&grid](LatticePoint p) {
        for (const auto& q : grid)
            if (q == p) return;
        grid.push_back(p);
    };
    const auto r = static_cast<std::int64_t>(std::floor(radius));
    const auto h = r / 2;
    const auto d = static_cast<std::int64_t>(std::floor(radius / std::sqrt(2.0)));
    if (r >= 1) {
        push_unique({r, 0});
        push_unique({0, h});
        push_unique({d, d});
        push_unique({-h, h});
    }
    return grid;
}

SecondMomentReport second_moment_report(const std::vector<std::int64_t>& n_values, double A,
                                        double epsilon, std::int64_t n_samples,
                                        std::uint64_t seed, int workers) {
    if (n_values.empty()) throw std::invalid_argument("second_moment_report: empty n grid");
    SecondMomentReport rep;
    rep.epsilon = epsilon;
    rep.min_e_n = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const std::int64_t n = n_values[i];
        const double sqrt_n = std::sqrt(static_cast<double>(n));
        const double a_eps =
            calibrate_a_eps(n, epsilon, 4000, derive_seed(seed, 100 + i), workers);
        const EventPredicate predicate = count_sup_within(a_eps * sqrt_n);
        const auto cells = second_moment_cells(n, target_grid(A * sqrt_n), predicate, n_samples,
                                               derive_seed(seed, 200 + i), workers);
        for (const auto& cell : cells) {
            rep.max_e_n2_over_log_n = std::max(rep.max_e_n2_over_log_n, cell.e_n2_over_log_n);
            rep.min_e_n = std::min(rep.min_e_n, cell.e_n);
            if (cell.p_pos < cell.pz_lower - 4.0 * cell.p_pos_stderr) rep.paley_zygmund_ok = false;
            rep.cells.push_back(cell);
        }
    }
    return rep;
}

double srw_expected_window_visits(std::int64_t wbegin, std::int64_t wend, LatticePoint y,
                                  int cap) {
    if (wbegin < 0 || wend < wbegin) throw std::invalid_argument("bad visit window");
    if (wend > cap) throw ResourceLimit("visit window exceeds DP cap");
    KernelSweeper sweeper;
    CompensatedSum total;
    if (wbegin == 0) total.add(sweeper.table().value(y));
    for (std::int64_t k = 1; k <= wend; ++k) {
        sweeper.step();
        if (k >= wbegin) total.add(sweeper.table().value(y));
    }
    return total.value();
}

double srw_conditional_window_return(std::int64_t n, double A, std::int64_t wbegin,
                                     std::int64_t wend) {
    if (n < 1 || wbegin <= n || wend < wbegin)
        throw std::invalid_argument("window must start after the conditioning time");

    // Backward absorption sweep for h(x) = P_x(hit 0 at a relative time in
    // [t1, t2]); u_t(y) is that probability given position y at relative
    // time t.
    const std::int64_t t1 = wbegin - n;
    const std::int64_t t2 = wend - n;
    const std::int64_t radius = t2;
    const std::int64_t side = 2 * radius + 1;
    std::vector<double> cur(static_cast<std::size_t>(side) * side, 0.0);
    std::vector<double> next(cur.size(), 0.0);
    const auto at = [side, radius](std::vector<double>& grid, std::int64_t x,
                                   std::int64_t y) -> double& {
        return grid[static_cast<std::size_t>(x + radius) * side +
                    static_cast<std::size_t>(y + radius)];
    };
    at(cur, 0, 0) = 1.0;  // u_{t2}(0) = 1
    for (std::int64_t t = t2 - 1; t >= 0; --t) {
        const std::int64_t reach = t2 - t;  // u_t vanishes beyond |y|_1 > reach
        for (std::int64_t x = -reach; x <= reach; ++x) {
            const std::int64_t ymax = reach - std::llabs(x);
            for (std::int64_t y = -ymax; y <= ymax; ++y) {
                if (x == 0 && y == 0 && t >= t1) {
                    at(next, 0, 0) = 1.0;
                    continue;
                }
                double acc = 0.0;
                if (x + 1 <= radius) acc += at(cur, x + 1, y);
                if (x - 1 >= -radius) acc += at(cur, x - 1, y);
                if (y + 1 <= radius) acc += at(cur, x, y + 1);
                if (y - 1 >= -radius) acc += at(cur, x, y - 1);
                at(next, x, y) = 0.25 * acc;
            }
        }
        std::swap(cur, next);
    }

    // Conditioned start distribution: counts at time n are Multinomial(n,1/4)
    // and the acceptance event plus the position are functions of the counts.
    const double accept4 = 4.0 * A * std::sqrt(static_cast<double>(n));
    const auto in_ball = [n, accept4](std::int64_t ni) {
        const auto c4 = static_cast<double>(4 * ni - n);
        return std::abs(c4) <= accept4;
    };
    std::int64_t lo = 0, hi = n;
    for (std::int64_t v = 0; v <= n; ++v)
        if (in_ball(v)) {
            lo = v;
            break;
        }
    for (std::int64_t v = n; v >= 0; --v)
        if (in_ball(v)) {
            hi = v;
            break;
        }

    std::vector<double> lg(static_cast<std::size_t>(n) + 2);
    for (std::size_t i = 0; i < lg.size(); ++i) lg[i] = std::lgamma(static_cast<double>(i) + 1.0);
    const double log_quarter = -std::log(4.0);
    CompensatedSum hit_weight, total_weight;
    for (std::int64_t n1 = lo; n1 <= hi; ++n1)
        for (std::int64_t n2 = lo; n2 <= hi; ++n2)
            for (std::int64_t n3 = lo; n3 <= hi; ++n3) {
                const std::int64_t n4 = n - n1 - n2 - n3;
                if (n4 < lo || n4 > hi) continue;
                const double logw = lg[static_cast<std::size_t>(n)] -
                                    lg[static_cast<std::size_t>(n1)] -
                                    lg[static_cast<std::size_t>(n2)] -
                                    lg[static_cast<std::size_t>(n3)] -
                                    lg[static_cast<std::size_t>(n4)] +
                                    static_cast<double>(n) * log_quarter;
                const double w = std::exp(logw);
                total_weight.add(w);
                const std::int64_t x = n1 - n3;
                const std::int64_t y = n2 - n4;
                if (std::llabs(x) + std::llabs(y) <= radius) hit_weight.add(w * at(cur, x, y));
            }
    if (total_weight.value() <= 0.0)
        throw InsufficientConditioningSamples("conditioning ball is empty");
    return hit_weight.value() / total_weight.value();
}

}  // namespace erwlab
