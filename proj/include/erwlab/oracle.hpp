#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "erwlab/lattice.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

// Hard cap on exhaustive enumeration depth: 4^10 paths is the largest table
// kept in memory.
inline constexpr int kMaxOraclePathLength = 10;

// Exhaustive path law at tiny depth. Index = base-4 code of the step
// sequence, least significant digit first; value = path probability.
class PathLaw {
public:
    PathLaw(int length, std::vector<double> probabilities);

    int length() const { return length_; }
    std::size_t size() const { return probabilities_.size(); }
    double probability(std::uint32_t code) const { return probabilities_[code]; }
    const std::vector<double>& probabilities() const { return probabilities_; }

    double total_mass() const;
    double max_abs_difference(const PathLaw& other) const;

    static std::vector<Direction> decode(std::uint32_t code, int length);
    static std::uint32_t encode(const std::vector<Direction>& steps);

private:
    int length_;
    std::vector<double> probabilities_;
};

// Path law of the reinforced walk, each path probability chained from the
// conditional step law (counting form).
PathLaw exact_erw_law(double alpha, int m);

// Same law derived through the replay construction with repeat probability
// p = (3*alpha+1)/4; an independent route to the same numbers.
PathLaw exact_replay_law(double alpha, int m);

// Total-probability check of the full-path likelihood ratio: lhs reweights
// uniform path mass by the per-step probability ratio, rhs sums the
// reinforced law directly over the same event.
struct RndIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap() const { return lhs - rhs; }
};
RndIdentity exact_rnd_identity(double alpha, int m,
                               const std::function<bool(std::uint32_t)>& event);

// Exact probability that the walk revisits the origin within the first m
// steps.
double exact_return_probability(double alpha, int m);

// Deterministic pseudo-random path event of density ~1/2, keyed by salt.
std::function<bool(std::uint32_t)> hashed_path_event(std::uint64_t salt);

}  // namespace erwlab
