#include "erwlab/restricted.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "erwlab/parallel.hpp"
#include "erwlab/rng.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

EventPredicate always_true_event() {
    return {"true", [](std::span<const Direction>) { return true; }, 1.0};
}

EventPredicate always_false_event() {
    return {"false", [](std::span<const Direction>) { return false; }, 0.0};
}

EventPredicate count_sup_within(double bound) {
    const auto threshold = static_cast<std::int64_t>(std::floor(4.0 * bound));
    return {"count_sup_within_" + std::to_string(bound),
            [threshold](std::span<const Direction> steps) {
                std::int64_t n[4] = {0, 0, 0, 0};
                std::int64_t k = 0;
                for (Direction d : steps) {
                    ++n[direction_index(d)];
                    ++k;
                    for (int i = 0; i < 4; ++i) {
                        const std::int64_t c4 = 4 * n[i] - k;
                        if (c4 > threshold || -c4 > threshold) return false;
                    }
                }
                return true;
            },
            std::numeric_limits<double>::quiet_NaN()};
}

namespace {

struct SampleOutcome {
    bool accepted = false;
    LatticePoint at_k;
};

}  // namespace

RestrictedKernel restricted_kernel(int k, int n, const EventPredicate& predicate,
                                   std::int64_t n_samples, std::uint64_t seed, int workers) {
    if (k < 0 || k > n) throw std::invalid_argument("restricted_kernel: need 0 <= k <= n");
    if (n_samples < 1) throw std::invalid_argument("restricted_kernel: need samples >= 1");

    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(n_samples));
    parallel_for_chunks(n_samples, workers, 256, [&](std::int64_t begin, std::int64_t end) {
        std::vector<Direction> steps(static_cast<std::size_t>(n));
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            SrwWalker walker;
            LatticePoint at_k;
            for (int s = 0; s < n; ++s) {
                steps[static_cast<std::size_t>(s)] = walker.step(rng);
                if (s + 1 == k) at_k = walker.position();
            }
            if (k == 0) at_k = LatticePoint{};
            auto& out = outcomes[static_cast<std::size_t>(w)];
            out.accepted = predicate.test(steps);
            out.at_k = at_k;
        }
    });

    RestrictedKernel result;
    result.values = PackedLatticeTable(k, k & 1);
    result.samples = n_samples;
    const double weight = 1.0 / static_cast<double>(n_samples);
    std::int64_t accepted = 0;
    const int umax = result.values.umax();
    for (const auto& out : outcomes) {
        if (!out.accepted) continue;
        ++accepted;
        const std::int64_t u = out.at_k.x + out.at_k.y;
        const std::int64_t v = out.at_k.x - out.at_k.y;
        result.values.cell(static_cast<int>((u + umax) / 2), static_cast<int>((v + umax) / 2)) +=
            weight;
    }
    const double p = static_cast<double>(accepted) * weight;
    result.event_probability = p;
    result.event_std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    return result;
}

L1Deficits l1_deficits(int n, const EventPredicate& predicate, std::int64_t n_samples,
                       std::uint64_t seed, int workers) {
    if (n < 0) throw std::invalid_argument("l1_deficits: n >= 0 required");
    if (n_samples < 1) throw std::invalid_argument("l1_deficits: need samples >= 1");

    const int wbegin = (n + 1) / 2;
    const int wlen = n - wbegin + 1;

    std::vector<unsigned char> accepted(static_cast<std::size_t>(n_samples), 0);
    parallel_for_chunks(n_samples, workers, 256, [&](std::int64_t begin, std::int64_t end) {
        std::vector<Direction> steps(static_cast<std::size_t>(n));
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            SrwWalker walker;
            for (int s = 0; s < n; ++s) steps[static_cast<std::size_t>(s)] = walker.step(rng);
            accepted[static_cast<std::size_t>(w)] = predicate.test(steps) ? 1 : 0;
        }
    });

    std::int64_t hits = 0;
    for (auto a : accepted) hits += a;
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);

    // The event indicator does not depend on the inner time index, so every
    // restricted kernel in the window carries the same total mass P(E); the
    // L1 gaps reduce to the missing mass per kernel and per window.
    L1Deficits out;
    out.kernel_deficit = 1.0 - p;
    out.green_deficit = static_cast<double>(wlen) * (1.0 - p);
    out.event_probability = p;
    out.event_std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    out.window_length = wlen;
    out.samples = n_samples;
    return out;
}

}  // namespace erwlab
