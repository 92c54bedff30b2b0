#include "erwlab/reweighting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "erwlab/errors.hpp"
#include "erwlab/estimate.hpp"

namespace erwlab {

double martingale_qv_increment(const DirectionCounts& counts) {
    const std::int64_t k = counts.step_count();
    if (k < 1) throw std::invalid_argument("qv increment needs step count >= 1");
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const auto c4 = static_cast<double>(counts.centered4(i));
        sum += c4 * c4;
    }
    const auto kk = static_cast<double>(k);
    // (1/4) sum_i (c4/4)^2 / k^2 = sum_i c4^2 / (64 k^2)
    return sum / (64.0 * kk * kk);
}

WindowReweighting window_rnd(const Trajectory& window, const DirectionCounts& d_at_n,
                             double alpha, std::int64_t n) {
    if (static_cast<std::int64_t>(window.length()) != n)
        throw std::invalid_argument("window length " + std::to_string(window.length()) +
                                    " does not match n=" + std::to_string(n));
    if (d_at_n.step_count() != n)
        throw std::invalid_argument("count snapshot is not at time n");

    WindowReweighting rw;
    rw.n = n;
    rw.d_at_n = d_at_n;
    rw.m_path.reserve(static_cast<std::size_t>(n) + 1);
    rw.qv_path.reserve(static_cast<std::size_t>(n));
    rw.m_path.push_back(0.0);

    DirectionCounts total = d_at_n;  // counts of the full walk at time n+k
    CompensatedSum log_sum;
    CompensatedSum m_sum;
    for (std::int64_t k = 0; k < n; ++k) {
        const Direction step = window.steps()[static_cast<std::size_t>(k)];
        const auto t = static_cast<double>(n + k);
        // Pre-step counts: the factor is the one-step transition ratio given
        // the walk so far.
        const auto c4 = static_cast<double>(total.centered4(direction_index(step)));
        const double x = alpha * c4 / t;  // 4*alpha*D/(n+k)
        if (x <= -1.0)
            throw NonpositiveFactor("likelihood-ratio factor 1 + " + std::to_string(x) +
                                    " <= 0 at window step " + std::to_string(k));
        log_sum.add(std::log1p(x));
        rw.qv_path.push_back(martingale_qv_increment(total));
        m_sum.add(0.25 * c4 / t);  // D_{n+k}(step)/(n+k)
        rw.m_path.push_back(m_sum.value());
        total.add(step);
    }
    rw.log_rnd = log_sum.value();
    return rw;
}

std::int64_t stopping_time_theta(const Trajectory& window, double a_eps, std::int64_t n) {
    if (static_cast<std::int64_t>(window.length()) != n)
        throw std::invalid_argument("window length does not match n");
    // Integer comparison: |4*D| > 4*a_eps*sqrt(n).
    const double threshold4 = 4.0 * a_eps * std::sqrt(static_cast<double>(n));
    std::int64_t counts[4] = {0, 0, 0, 0};
    for (std::int64_t j = 1; j <= n; ++j) {
        ++counts[direction_index(window.steps()[static_cast<std::size_t>(j - 1)])];
        for (int i = 0; i < 4; ++i) {
            const auto c4 = static_cast<double>(4 * counts[i] - j);
            if (c4 > threshold4 || -c4 > threshold4) return j;
        }
    }
    return n;
}

void ContiguityConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(A > 0.0)) throw std::invalid_argument("A must be positive");
    if (n < 1) throw std::invalid_argument("window parameter n must be >= 1");
}

double contiguity_constant(const ContiguityConfig& cfg, double alpha) {
    const double s = cfg.A + cfg.A_eps;
    const double four_alpha = 4.0 * alpha;
    return std::exp(-four_alpha * s / std::sqrt(cfg.epsilon) - four_alpha * four_alpha * s * s);
}

}  // namespace erwlab
