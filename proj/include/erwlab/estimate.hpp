#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace erwlab {

// Streaming mean/variance accumulator (Welford). merge() is exact in the
// usual pairwise form; reductions always merge in walker order so results
// do not depend on the worker count.
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningMoments& other) {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double delta = other.mean_ - mean_;
        const std::int64_t total = n_ + other.n_;
        m2_ += other.m2_ + delta * delta * static_cast<double>(n_) *
                               static_cast<double>(other.n_) / static_cast<double>(total);
        mean_ += delta * static_cast<double>(other.n_) / static_cast<double>(total);
        n_ = total;
    }

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }

    // Unbiased sample variance; 0 for fewer than two samples.
    double variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }

    double stddev() const { return std::sqrt(variance()); }

    double std_error() const {
        return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Monte Carlo estimate with provenance.
struct EstimateResult {
    std::int64_t count = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;

    static EstimateResult from(const RunningMoments& m, std::uint64_t seed,
                               std::string config_hash = {}) {
        return {m.count(), m.mean(), m.std_error(), seed, std::move(config_hash)};
    }
};

// Fraction-of-successes estimate with binomial standard error.
inline EstimateResult binomial_estimate(std::int64_t successes, std::int64_t trials,
                                        std::uint64_t seed, std::string config_hash = {}) {
    const double p = trials > 0 ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    const double se = trials > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
    return {trials, p, se, seed, std::move(config_hash)};
}

// Neumaier compensated accumulator for long sums of near-unit terms.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace erwlab
