#include "erwlab/walk.hpp"

#include <stdexcept>

#include "erwlab/errors.hpp"

namespace erwlab {

std::array<double, 4> step_probabilities(const DirectionCounts& counts, double alpha) {
    require_alpha(alpha);
    const std::int64_t k = counts.step_count();
    if (k == 0) return {0.25, 0.25, 0.25, 0.25};
    std::array<double, 4> q;
    const double inv4k = 1.0 / (4.0 * static_cast<double>(k));
    for (int i = 0; i < 4; ++i)
        q[i] = 0.25 + alpha * static_cast<double>(counts.centered4(i)) * inv4k;
    return q;
}

namespace {

Direction draw_replay(const std::vector<Direction>& history, double alpha, Xoshiro256pp& rng) {
    // Pick a uniform former step; repeat it with probability p = (3a+1)/4,
    // otherwise move uniformly among the other three directions.
    const Direction former = history[rng.below(history.size())];
    const double p = alpha_to_memory_param(alpha);
    if (rng.uniform01() < p) return former;
    const int offset = 1 + static_cast<int>(rng.below(3));
    return static_cast<Direction>((direction_index(former) + offset) & 3);
}

}  // namespace

void advance(WalkState& state, const WalkParams& params, Xoshiro256pp& rng) {
    params.validate();
    Direction d;
    if (state.counts.step_count() == 0) {
        d = static_cast<Direction>(rng.direction4());
    } else if (params.sampler == Sampler::Replay) {
        if (!state.history)
            throw std::invalid_argument("replay sampler requires a history");
        d = draw_replay(*state.history, params.alpha, rng);
    } else {
        const auto q = step_probabilities(state.counts, params.alpha);
        const double u = rng.uniform01();
        double acc = 0.0;
        int pick = 3;
        for (int i = 0; i < 3; ++i) {
            acc += q[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        d = direction_from_index(pick);
    }
    state.counts.add(d);
    state.position.move(d);
    if (state.history) state.history->push_back(d);
}

LatticePoint Trajectory::position_at(std::size_t k) const {
    LatticePoint p = origin_;
    for (std::size_t i = 0; i < k; ++i) p.move(steps_[i]);
    return p;
}

std::vector<LatticePoint> Trajectory::positions() const {
    std::vector<LatticePoint> out;
    out.reserve(steps_.size() + 1);
    LatticePoint p = origin_;
    out.push_back(p);
    for (Direction d : steps_) {
        p.move(d);
        out.push_back(p);
    }
    return out;
}

DirectionCounts Trajectory::counts_at(std::size_t k) const {
    DirectionCounts c;
    for (std::size_t i = 0; i < k; ++i) c.add(steps_[i]);
    return c;
}

Trajectory shift_window(const Trajectory& traj, std::size_t theta) {
    if (theta > traj.length())
        throw std::out_of_range("shift offset exceeds trajectory length");
    std::vector<Direction> tail(traj.steps().begin() + static_cast<std::ptrdiff_t>(theta),
                                traj.steps().end());
    return Trajectory(std::move(tail), LatticePoint{});
}

Trajectory run_walk(const WalkParams& params, std::int64_t n_steps, std::int64_t history_cap) {
    params.validate();
    if (n_steps < 0) throw std::invalid_argument("negative step count");
    if (n_steps > history_cap)
        throw ResourceLimit("walk of " + std::to_string(n_steps) +
                            " steps exceeds history cap " + std::to_string(history_cap));
    Xoshiro256pp rng = substream(params.seed, params.walker_id);
    WalkState state = WalkState::at_origin(true);
    state.history->reserve(static_cast<std::size_t>(n_steps));
    for (std::int64_t i = 0; i < n_steps; ++i) advance(state, params, rng);
    return Trajectory(std::move(*state.history));
}

}  // namespace erwlab
