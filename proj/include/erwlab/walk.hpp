#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erwlab/counts.hpp"
#include "erwlab/lattice.hpp"
#include "erwlab/params.hpp"
#include "erwlab/rng.hpp"

namespace erwlab {

// Conditional step law given the counts after k steps:
//   q_i = 1/4 + alpha * D_k(e_i)/k   for k >= 1,
// and the uniform law for k = 0 (the 0/0 = 0 convention). Computed from the
// integer 4*N_i - k so the only rounding is one division per direction.
std::array<double, 4> step_probabilities(const DirectionCounts& counts, double alpha);

struct WalkState {
    LatticePoint position;
    DirectionCounts counts;
    // Present only when the replay sampler is in use or the caller wants the
    // full path; the counting sampler needs no history.
    std::optional<std::vector<Direction>> history;

    static WalkState at_origin(bool keep_history) {
        WalkState s;
        if (keep_history) s.history.emplace();
        return s;
    }
};

// Appends one step drawn from the reinforced law. Counting and replay
// samplers induce the same path law; replay requires history.
void advance(WalkState& state, const WalkParams& params, Xoshiro256pp& rng);

// A finite step sequence with positions reconstructed on demand.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<Direction> steps, LatticePoint origin = {})
        : steps_(std::move(steps)), origin_(origin) {}

    std::size_t length() const { return steps_.size(); }
    const std::vector<Direction>& steps() const { return steps_; }
    std::span<const Direction> step_span() const { return steps_; }
    LatticePoint origin() const { return origin_; }

    LatticePoint position_at(std::size_t k) const;
    LatticePoint final_position() const { return position_at(steps_.size()); }
    std::vector<LatticePoint> positions() const;  // length()+1 points, origin first
    DirectionCounts counts_at(std::size_t k) const;

private:
    std::vector<Direction> steps_;
    LatticePoint origin_{};
};

// Recentered suffix starting after step theta: steps theta..end, origin (0,0).
Trajectory shift_window(const Trajectory& traj, std::size_t theta);

// Default cap on stored histories (count of steps); replay runs and recorded
// trajectories beyond this throw ResourceLimit.
inline constexpr std::int64_t kDefaultHistoryCap = std::int64_t{1} << 26;

// Runs a fresh walk of n_steps from the origin on the walker's own
// substream. Deterministic in (seed, walker_id, sampler, alpha, n_steps).
Trajectory run_walk(const WalkParams& params, std::int64_t n_steps,
                    std::int64_t history_cap = kDefaultHistoryCap);

// --- streaming helpers used by the Monte Carlo engines -------------------

// Counting-law walker with O(1) state. step() draws one direction from the
// reinforced law and updates counts and position.
class CountingWalker {
public:
    explicit CountingWalker(double alpha)
        : alpha_(alpha), one_minus_alpha_(1.0 - alpha), four_alpha_(4.0 * alpha) {}

    Direction step(Xoshiro256pp& rng) {
        Direction d;
        if (k_ == 0) {
            d = static_cast<Direction>(rng.direction4());
        } else {
            // Step law in threshold form, scaled by 4k: direction i has
            // weight k(1-alpha) + 4*alpha*N_i (= 4k * q_i), so comparing
            // u*4k against the running weights needs no division, and the
            // branchless index sum sidesteps a mispredict on every step.
            // Rounding slack in the last weight only widens direction 3 by
            // a few ulp.
            const double kk = static_cast<double>(k_);
            const double u4k = rng.uniform01() * (4.0 * kk);
            const double base = kk * one_minus_alpha_;
            const double t0 = base + four_alpha_ * static_cast<double>(n_[0]);
            const double t1 = t0 + base + four_alpha_ * static_cast<double>(n_[1]);
            const double t2 = t1 + base + four_alpha_ * static_cast<double>(n_[2]);
            const int idx = (u4k >= t0) + (u4k >= t1) + (u4k >= t2);
            d = static_cast<Direction>(idx);
        }
        apply(d);
        return d;
    }

    void apply(Direction d) {
        ++n_[direction_index(d)];
        ++k_;
        pos_.move(d);
    }

    std::int64_t step_count() const { return k_; }
    LatticePoint position() const { return pos_; }
    std::int64_t raw(int i) const { return n_[i]; }
    std::int64_t centered4(int i) const { return 4 * n_[i] - k_; }
    std::int64_t max_abs_centered4() const {
        std::int64_t m = 0;
        for (int i = 0; i < 4; ++i) {
            const std::int64_t a = std::llabs(centered4(i));
            if (a > m) m = a;
        }
        return m;
    }
    DirectionCounts counts() const { return DirectionCounts({n_[0], n_[1], n_[2], n_[3]}, k_); }

    // Resumes from a snapshot (used for continuations of a stored prefix;
    // the count vector is a sufficient statistic for the step law).
    static CountingWalker from_snapshot(double alpha, const DirectionCounts& counts,
                                        LatticePoint position) {
        CountingWalker w(alpha);
        w.n_ = counts.raw_counts();
        w.k_ = counts.step_count();
        w.pos_ = position;
        return w;
    }

private:
    std::array<std::int64_t, 4> n_{0, 0, 0, 0};
    std::int64_t k_ = 0;
    LatticePoint pos_{};
    double alpha_;
    double one_minus_alpha_;
    double four_alpha_;
};

// Uniform-step walker (the alpha = 0 baseline), kept separate because the
// baseline Monte Carlo loops are the hottest code in the lab.
class SrwWalker {
public:
    Direction step(Xoshiro256pp& rng) {
        const Direction d = static_cast<Direction>(rng.direction4());
        apply(d);
        return d;
    }

    void apply(Direction d) {
        ++n_[direction_index(d)];
        ++k_;
        pos_.move(d);
    }

    std::int64_t step_count() const { return k_; }
    LatticePoint position() const { return pos_; }
    std::int64_t raw(int i) const { return n_[i]; }
    std::int64_t centered4(int i) const { return 4 * n_[i] - k_; }
    std::int64_t max_abs_centered4() const {
        std::int64_t m = 0;
        for (int i = 0; i < 4; ++i) {
            const std::int64_t a = std::llabs(centered4(i));
            if (a > m) m = a;
        }
        return m;
    }
    DirectionCounts counts() const { return DirectionCounts({n_[0], n_[1], n_[2], n_[3]}, k_); }

private:
    std::array<std::int64_t, 4> n_{0, 0, 0, 0};
    std::int64_t k_ = 0;
    LatticePoint pos_{};
};

}  // namespace erwlab
