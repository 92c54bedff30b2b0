#include "erwlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erwlab/errors.hpp"

namespace erwlab {

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("ols_slope: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw DegenerateGrid("ols_slope: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DegenerateGrid("ols_slope: all abscissae equal");
    return sxy / sxx;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical_value(double level, std::int64_t m, std::int64_t n) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks level in (0,1)");
    const double c = std::sqrt(-0.5 * std::log(level / 2.0));
    return c * std::sqrt(static_cast<double>(m + n) /
                         (static_cast<double>(m) * static_cast<double>(n)));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p in (0,1)");
    // Acklam's piecewise rational approximation, |error| < 1.15e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double chi_square_critical(double df, double level) {
    if (df <= 0) throw std::invalid_argument("chi_square_critical: df > 0 required");
    const double z = normal_quantile(1.0 - level);
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

ChiSquareResult chi_square_statistic(std::span<const double> expected,
                                     std::span<const std::int64_t> observed,
                                     double min_expected) {
    if (expected.size() != observed.size())
        throw std::invalid_argument("chi_square_statistic: size mismatch");
    // Pool left-to-right until each pooled bin reaches the floor.
    std::vector<double> e;
    std::vector<double> o;
    double pe = 0.0, po = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        pe += expected[i];
        po += static_cast<double>(observed[i]);
        if (pe >= min_expected) {
            e.push_back(pe);
            o.push_back(po);
            pe = po = 0.0;
        }
    }
    if (pe > 0.0 || po > 0.0) {
        if (!e.empty()) {
            e.back() += pe;
            o.back() += po;
        } else {
            e.push_back(pe);
            o.push_back(po);
        }
    }
    ChiSquareResult r;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] <= 0.0) continue;
        const double diff = o[i] - e[i];
        r.statistic += diff * diff / e[i];
    }
    r.dof = static_cast<int>(e.size()) - 1;
    return r;
}

}  // namespace erwlab
