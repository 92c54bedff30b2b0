#pragma once

#include <array>
#include <cstdint>

namespace erwlab {

// One splitmix64 step (Steele/Lea/Flood constants). Used both to expand
// seeds and as the mixing hash that derives per-walker substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
// Seeding goes through splitmix64 so any 64-bit seed, including 0, yields a
// valid state. Deterministic across platforms; that is what the
// reproducibility contract of the whole lab rests on.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed = 0) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Unbiased uniform in [0, bound), bound >= 1 (Lemire multiply-shift with
    // rejection on the short interval).
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform direction index in {0,1,2,3} from the top two bits.
    int direction4() { return static_cast<int>((*this)() >> 62); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
};

// Independent, reproducible substream for one walker. splitmix64 applied to
// (whitened master seed + stream id) is injective in the stream id, so
// distinct walkers can never share a seed, and consecutive ids land far
// apart in seed space.
inline Xoshiro256pp substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed;
    const std::uint64_t base = splitmix64(s);
    std::uint64_t derived = base + stream_id;
    return Xoshiro256pp(splitmix64(derived));
}

// Tagged child seed; stages of one experiment (calibration, prefixes,
// continuations, ...) draw from disjoint substream families.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
    std::uint64_t s = master_seed ^ (0xA0761D6478BD642FULL * (tag + 1));
    return splitmix64(s);
}

}  // namespace erwlab
