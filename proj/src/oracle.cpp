#include "erwlab/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "erwlab/estimate.hpp"
#include "erwlab/params.hpp"
#include "erwlab/rng.hpp"

namespace erwlab {

namespace {

void require_depth(int m) {
    if (m < 0 || m > kMaxOraclePathLength)
        throw std::invalid_argument("oracle path length " + std::to_string(m) +
                                    " outside [0, " + std::to_string(kMaxOraclePathLength) + "]");
}

// Depth-first walk over all paths of length m, maintaining integer counts.
// visit(code, depth_probability) is called once per complete path.
template <typename StepProb, typename Visit>
void enumerate_paths(int m, StepProb&& step_prob, Visit&& visit) {
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    std::uint32_t code = 0;
    auto rec = [&](auto&& self, int depth, double prob) -> void {
        if (depth == m) {
            visit(code, prob);
            return;
        }
        for (int d = 0; d < 4; ++d) {
            const double q = step_prob(counts, depth, d);
            code |= static_cast<std::uint32_t>(d) << (2 * depth);
            ++counts[d];
            self(self, depth + 1, prob * q);
            --counts[d];
            code &= ~(std::uint32_t{3} << (2 * depth));
        }
    };
    rec(rec, 0, 1.0);
}

double counting_step_prob(const std::array<std::int64_t, 4>& counts, int k, int d, double alpha) {
    if (k == 0) return 0.25;
    // 1/4 + alpha*(4N - k) / (4k), exact integers upstairs.
    return 0.25 + alpha * static_cast<double>(4 * counts[d] - k) / (4.0 * static_cast<double>(k));
}

}  // namespace

PathLaw::PathLaw(int length, std::vector<double> probabilities)
    : length_(length), probabilities_(std::move(probabilities)) {
    if (probabilities_.size() != (std::size_t{1} << (2 * length_)))
        throw std::invalid_argument("path law table size is not 4^m");
}

double PathLaw::total_mass() const {
    CompensatedSum s;
    for (double p : probabilities_) s.add(p);
    return s.value();
}

double PathLaw::max_abs_difference(const PathLaw& other) const {
    if (other.length_ != length_) throw std::invalid_argument("path laws of different depth");
    double m = 0.0;
    for (std::size_t i = 0; i < probabilities_.size(); ++i)
        m = std::max(m, std::abs(probabilities_[i] - other.probabilities_[i]));
    return m;
}

std::vector<Direction> PathLaw::decode(std::uint32_t code, int length) {
    std::vector<Direction> steps(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i)
        steps[static_cast<std::size_t>(i)] = static_cast<Direction>((code >> (2 * i)) & 3);
    return steps;
}

std::uint32_t PathLaw::encode(const std::vector<Direction>& steps) {
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < steps.size(); ++i)
        code |= static_cast<std::uint32_t>(direction_index(steps[i])) << (2 * i);
    return code;
}

PathLaw exact_erw_law(double alpha, int m) {
    require_depth(m);
    require_alpha(alpha);
    std::vector<double> table(std::size_t{1} << (2 * m), 0.0);
    enumerate_paths(
        m,
        [alpha](const std::array<std::int64_t, 4>& counts, int k, int d) {
            return counting_step_prob(counts, k, d, alpha);
        },
        [&](std::uint32_t code, double p) { table[code] = p; });
    return PathLaw(m, std::move(table));
}

PathLaw exact_replay_law(double alpha, int m) {
    require_depth(m);
    require_alpha(alpha);
    const double p_repeat = alpha_to_memory_param(alpha);
    const double p_other = (1.0 - p_repeat) / 3.0;
    std::vector<double> table(std::size_t{1} << (2 * m), 0.0);
    enumerate_paths(
        m,
        [&](const std::array<std::int64_t, 4>& counts, int k, int d) {
            if (k == 0) return 0.25;
            // Uniform former step j, then repeat with prob p or move to one
            // of the other three directions with prob (1-p)/3 each.
            const double nd = static_cast<double>(counts[d]);
            const double kk = static_cast<double>(k);
            return (nd * p_repeat + (kk - nd) * p_other) / kk;
        },
        [&](std::uint32_t code, double p) { table[code] = p; });
    return PathLaw(m, std::move(table));
}

RndIdentity exact_rnd_identity(double alpha, int m,
                               const std::function<bool(std::uint32_t)>& event) {
    require_depth(m);
    require_alpha(alpha);
    const double uniform_mass = std::pow(0.25, m);
    RndIdentity out;
    CompensatedSum lhs, rhs;
    enumerate_paths(
        m,
        [alpha](const std::array<std::int64_t, 4>& counts, int k, int d) {
            return counting_step_prob(counts, k, d, alpha);
        },
        [&](std::uint32_t code, double p) {
            if (!event || event(code)) rhs.add(p);
        });
    // Likelihood-ratio route: RND(path) = prod_k (1 + alpha*(4N_k - k)/k),
    // with the k = 0 factor equal to 1.
    enumerate_paths(
        m,
        [alpha](const std::array<std::int64_t, 4>& counts, int k, int d) {
            if (k == 0) return 1.0;
            return 1.0 + alpha * static_cast<double>(4 * counts[d] - k) / static_cast<double>(k);
        },
        [&](std::uint32_t code, double rnd) {
            if (!event || event(code)) lhs.add(rnd * uniform_mass);
        });
    out.lhs = lhs.value();
    out.rhs = rhs.value();
    return out;
}

double exact_return_probability(double alpha, int m) {
    require_depth(m);
    require_alpha(alpha);
    const PathLaw law = exact_erw_law(alpha, m);
    CompensatedSum total;
    for (std::uint32_t code = 0; code < law.size(); ++code) {
        std::int64_t x = 0, y = 0;
        bool returned = false;
        for (int k = 0; k < m; ++k) {
            const auto d = static_cast<Direction>((code >> (2 * k)) & 3);
            x += step_dx(d);
            y += step_dy(d);
            if (x == 0 && y == 0) {
                returned = true;
                break;
            }
        }
        if (returned) total.add(law.probability(code));
    }
    return total.value();
}

std::function<bool(std::uint32_t)> hashed_path_event(std::uint64_t salt) {
    return [salt](std::uint32_t code) {
        std::uint64_t s = salt ^ (static_cast<std::uint64_t>(code) * 0x9E3779B97F4A7C15ULL);
        return (splitmix64(s) & 1) != 0;
    };
}

}  // namespace erwlab
