#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "erwlab/lattice.hpp"

namespace erwlab {

// Exact integer direction counts of a walk prefix. raw(i) is the number of
// steps taken in direction i, step_count() the prefix length k. The centered
// process D_k(e_i) = raw(i) - k/4 is only ever materialized as the integer
// 4*D_k(e_i) = 4*raw(i) - k, so the sum-zero identity over the four
// directions holds exactly, with no floating point, over arbitrarily long
// walks.
class DirectionCounts {
public:
    DirectionCounts() = default;

    DirectionCounts(std::array<std::int64_t, 4> raw, std::int64_t step_count)
        : raw_(raw), step_count_(step_count) {
        std::int64_t sum = 0;
        for (int i = 0; i < 4; ++i) {
            if (raw_[i] < 0) throw std::invalid_argument("negative direction count");
            sum += raw_[i];
        }
        if (sum != step_count_)
            throw std::invalid_argument("direction counts do not sum to step count");
    }

    void add(Direction d) {
        ++raw_[direction_index(d)];
        ++step_count_;
    }

    std::int64_t raw(int i) const { return raw_[i]; }
    const std::array<std::int64_t, 4>& raw_counts() const { return raw_; }
    std::int64_t step_count() const { return step_count_; }

    // 4*D_k(e_i) = 4*N_k(e_i) - k, exact.
    std::int64_t centered4(int i) const { return 4 * raw_[i] - step_count_; }

    double centered(int i) const { return 0.25 * static_cast<double>(centered4(i)); }

    // Exactly zero for every reachable state.
    std::int64_t centered4_sum() const {
        return centered4(0) + centered4(1) + centered4(2) + centered4(3);
    }

    std::int64_t max_abs_centered4() const {
        std::int64_t m = 0;
        for (int i = 0; i < 4; ++i) {
            const std::int64_t a = std::llabs(centered4(i));
            if (a > m) m = a;
        }
        return m;
    }

private:
    std::array<std::int64_t, 4> raw_{0, 0, 0, 0};
    std::int64_t step_count_ = 0;
};

}  // namespace erwlab
