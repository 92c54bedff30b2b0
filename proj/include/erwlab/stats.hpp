#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace erwlab {

// Ordinary least squares slope of y against x. Throws DegenerateGrid if
// fewer than two distinct x values.
double ols_slope(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov distance; both inputs are sorted in place.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Critical value of the two-sample KS distance at significance `level`
// (asymptotic formula c(level) * sqrt((m+n)/(m*n))).
double ks_critical_value(double level, std::int64_t m, std::int64_t n);

// Upper quantile of the chi-square distribution via the Wilson-Hilferty
// cube approximation; adequate for the goodness-of-fit gates used here
// (df >= 10, level 0.01).
double chi_square_critical(double df, double level);

// Upper quantile of the standard normal (Acklam's rational approximation).
double normal_quantile(double p);

// Pearson chi-square statistic over bins with expected counts; bins with
// expected < min_expected are pooled into their neighbor. Returns the
// statistic and the effective degrees of freedom (bins - 1).
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
};
ChiSquareResult chi_square_statistic(std::span<const double> expected,
                                     std::span<const std::int64_t> observed,
                                     double min_expected = 5.0);

}  // namespace erwlab
