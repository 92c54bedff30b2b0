#include "erwlab/triadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erwlab/errors.hpp"
#include "erwlab/parallel.hpp"
#include "erwlab/rng.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

WindowReturnEstimate window_return_probability_erw(double alpha, std::int64_t n, double A,
                                                   std::int64_t trials, std::uint64_t seed,
                                                   int workers) {
    require_alpha(alpha);
    if (n < 1) throw std::invalid_argument("window return: n >= 1");
    if (trials < 1) throw std::invalid_argument("window return: trials >= 1");

    const std::int64_t wbegin = (5 * n + 1) / 2;  // ceil(5n/2)
    const std::int64_t wend = 3 * n;
    const bool conditioned = A > 0.0;
    const double accept4 = 4.0 * A * std::sqrt(static_cast<double>(n));

    // 0: rejected, 1: accepted no hit, 2: accepted hit.
    std::vector<unsigned char> outcome(static_cast<std::size_t>(trials), 0);
    parallel_for_chunks(trials, workers, 16, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            CountingWalker walker(alpha);
            for (std::int64_t k = 0; k < n; ++k) walker.step(rng);
            if (conditioned) {
                bool ok = true;
                for (int i = 0; i < 4; ++i) {
                    const auto c4 = static_cast<double>(walker.centered4(i));
                    if (std::abs(c4) > accept4) ok = false;
                }
                if (!ok) continue;
            }
            bool hit = false;
            for (std::int64_t k = n + 1; k <= wend; ++k) {
                walker.step(rng);
                if (k >= wbegin && walker.position() == LatticePoint{}) {
                    hit = true;
                    break;
                }
            }
            outcome[static_cast<std::size_t>(w)] = hit ? 2 : 1;
        }
    });

    std::int64_t accepted = 0, hits = 0;
    for (auto o : outcome) {
        if (o == 0) continue;
        ++accepted;
        if (o == 2) ++hits;
    }
    if (accepted < 100)
        throw InsufficientConditioningSamples("only " + std::to_string(accepted) + " of " +
                                              std::to_string(trials) +
                                              " prefixes passed the count bound");

    WindowReturnEstimate est;
    est.alpha = alpha;
    est.n = n;
    est.A = A;
    est.window_begin = wbegin;
    est.window_end = wend;
    est.accepted = accepted;
    est.trials = trials;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(accepted);
    est.std_error =
        std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(accepted));
    est.logn_scaled = std::log(static_cast<double>(n)) * est.p_hat;
    return est;
}

DyadicReturnRecord triadic_window_scan(double alpha, int j, std::int64_t n_prefixes,
                                       std::int64_t continuations, std::uint64_t seed,
                                       int workers) {
    require_alpha(alpha);
    if (j < 1 || j > kMaxTriadicLevel)
        throw std::invalid_argument("triadic level outside [1, " +
                                    std::to_string(kMaxTriadicLevel) + "]");
    if (n_prefixes < 1 || continuations < 1)
        throw std::invalid_argument("triadic scan needs prefixes and continuations >= 1");

    std::int64_t wbegin = 1;
    for (int i = 0; i < j; ++i) wbegin *= 3;
    const std::int64_t wend = 3 * wbegin;

    DyadicReturnRecord rec;
    rec.j = j;
    rec.window_begin = wbegin;
    rec.window_end = wend;
    rec.prefixes.resize(static_cast<std::size_t>(n_prefixes));

    parallel_for_chunks(n_prefixes, workers, 1, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t p = begin; p < end; ++p) {
            Xoshiro256pp prefix_rng =
                substream(derive_seed(seed, 1), static_cast<std::uint64_t>(p));
            CountingWalker prefix(alpha);
            for (std::int64_t k = 0; k < wbegin; ++k) prefix.step(prefix_rng);
            const DirectionCounts snapshot = prefix.counts();
            const LatticePoint at_start = prefix.position();
            const bool starts_at_origin = at_start == LatticePoint{};

            Xoshiro256pp cont_rng =
                substream(derive_seed(seed, 2), static_cast<std::uint64_t>(p));
            std::int64_t hits = 0;
            for (std::int64_t r = 0; r < continuations; ++r) {
                if (starts_at_origin) {  // k = 3^j itself counts as a hit
                    ++hits;
                    continue;
                }
                CountingWalker walker = CountingWalker::from_snapshot(alpha, snapshot, at_start);
                bool hit = false;
                for (std::int64_t k = wbegin + 1; k <= wend; ++k) {
                    walker.step(cont_rng);
                    if (walker.position() == LatticePoint{}) {
                        hit = true;
                        break;
                    }
                }
                hits += hit ? 1 : 0;
            }
            auto& out = rec.prefixes[static_cast<std::size_t>(p)];
            out.prefix_id = p;
            out.hit_count = hits;
            out.trials = continuations;
            out.p_hat_inner = static_cast<double>(hits) / static_cast<double>(continuations);
        }
    });

    double sum = 0.0;
    for (const auto& pre : rec.prefixes) sum += pre.p_hat_inner;
    rec.p_mean = sum / static_cast<double>(n_prefixes);
    return rec;
}

DivergenceReport cumulative_return_divergence(std::span<const DyadicReturnRecord> records,
                                              int delta_j) {
    if (records.empty()) throw std::invalid_argument("no scan records");
    const DyadicReturnRecord* base = nullptr;
    for (const auto& rec : records) {
        if (delta_j < 0) {
            if (!base || rec.j < base->j) base = &rec;
        } else if (rec.j == delta_j) {
            base = &rec;
        }
    }
    if (!base)
        throw std::invalid_argument("no scan record at the delta level");

    // delta = empirical 5th percentile of j * p_hat_inner at the base level.
    std::vector<double> scaled;
    scaled.reserve(base->prefixes.size());
    for (const auto& pre : base->prefixes)
        scaled.push_back(static_cast<double>(base->j) * pre.p_hat_inner);
    std::sort(scaled.begin(), scaled.end());
    const auto idx = static_cast<std::size_t>(
        std::floor(0.05 * static_cast<double>(scaled.size() - 1)));
    DivergenceReport rep;
    rep.delta = scaled[idx];
    rep.delta_j = base->j;

    double running = 0.0;
    for (const auto& rec : records) {
        rep.js.push_back(rec.j);
        rep.p_means.push_back(rec.p_mean);
        running += rec.p_mean;
        rep.partial_sums.push_back(running);
        std::int64_t above = 0;
        for (const auto& pre : rec.prefixes)
            if (static_cast<double>(rec.j) * pre.p_hat_inner > rep.delta) ++above;
        rep.frac_above_delta.push_back(static_cast<double>(above) /
                                       static_cast<double>(rec.prefixes.size()));
        const double required = rep.delta / (2.0 * static_cast<double>(rec.j));
        rep.required_increment.push_back(required);
        if (rec.p_mean < required) rep.increments_ok = false;
    }
    return rep;
}

}  // namespace erwlab
