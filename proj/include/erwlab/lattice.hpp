#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>

namespace erwlab {

// The four axis directions of the square lattice in the fixed order
// +x, +y, -x, -y. The underlying value doubles as the array index and as
// the 2-bit code in the binary trajectory format.
enum class Direction : std::uint8_t {
    PlusX = 0,
    PlusY = 1,
    MinusX = 2,
    MinusY = 3,
};

inline constexpr int kNumDirections = 4;

constexpr int direction_index(Direction d) { return static_cast<int>(d); }

constexpr Direction direction_from_index(int i) {
    return static_cast<Direction>(i & 3);
}

// Negation swaps +x <-> -x and +y <-> -y.
constexpr Direction opposite(Direction d) {
    return static_cast<Direction>((static_cast<int>(d) + 2) & 3);
}

constexpr std::int64_t step_dx(Direction d) {
    constexpr std::int64_t table[4] = {1, 0, -1, 0};
    return table[static_cast<int>(d)];
}

constexpr std::int64_t step_dy(Direction d) {
    constexpr std::int64_t table[4] = {0, 1, 0, -1};
    return table[static_cast<int>(d)];
}

// Exact integer lattice coordinates; no floating point anywhere in the
// position bookkeeping.
struct LatticePoint {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;

    void move(Direction d) {
        x += step_dx(d);
        y += step_dy(d);
    }

    LatticePoint moved(Direction d) const {
        return {x + step_dx(d), y + step_dy(d)};
    }

    std::int64_t norm1() const { return std::llabs(x) + std::llabs(y); }

    double norm2() const {
        return std::sqrt(static_cast<double>(x) * static_cast<double>(x) +
                         static_cast<double>(y) * static_cast<double>(y));
    }

    std::int64_t norm2_sq() const { return x * x + y * y; }
};

struct LatticePointHash {
    std::size_t operator()(const LatticePoint& p) const {
        std::uint64_t h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<std::uint64_t>(p.y) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace erwlab
