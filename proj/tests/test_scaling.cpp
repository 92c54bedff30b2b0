#include <doctest.h>

#include <cmath>

#include "erwlab/errors.hpp"
#include "erwlab/scaling.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/walk.hpp"

using namespace erwlab;

TEST_CASE("uniform walk has E||X_n||^2 = n") {
    ScalingSweepConfig cfg;
    cfg.alphas = {0.0};
    cfg.n_grid = {1000};
    cfg.walks_per_cell = 20000;
    cfg.seed = 11;
    cfg.workers = 2;
    const MomentCurve curve = msd_sweep(cfg);
    REQUIRE(curve.cells.size() == 1);
    const auto& cell = curve.cells[0];
    CHECK(std::abs(cell.mean_msd - 1000.0) <= 4.0 * cell.msd_stderr);
    // Per-walk sum-zero identity makes the four scaled means cancel exactly.
    CHECK(std::abs(cell.d_mean[0] + cell.d_mean[1] + cell.d_mean[2] + cell.d_mean[3]) <= 1e-12);
    CHECK(cell.d1_var > 0.0);
}

TEST_CASE("direction count of the uniform walk is Binomial(n, 1/4)") {
    // Chi-square goodness of fit at the 1% level, 1e5 walks of length 1000.
    const std::int64_t n = 1000;
    const std::int64_t walks = 100000;
    std::vector<std::int64_t> observed(static_cast<std::size_t>(n) + 1, 0);
    Xoshiro256pp seeder(0);
    for (std::int64_t w = 0; w < walks; ++w) {
        Xoshiro256pp rng = substream(424242, static_cast<std::uint64_t>(w));
        SrwWalker walker;
        for (std::int64_t k = 0; k < n; ++k) walker.step(rng);
        ++observed[static_cast<std::size_t>(walker.raw(0))];
    }
    // Binomial pmf by the multiplicative recursion, scaled to counts.
    std::vector<double> expected(static_cast<std::size_t>(n) + 1, 0.0);
    double logp = static_cast<double>(n) * std::log(0.75);
    expected[0] = std::exp(logp) * static_cast<double>(walks);
    for (std::int64_t k = 1; k <= n; ++k) {
        logp += std::log(static_cast<double>(n - k + 1) / static_cast<double>(k)) +
                std::log(0.25 / 0.75);
        expected[static_cast<std::size_t>(k)] = std::exp(logp) * static_cast<double>(walks);
    }
    const auto res = chi_square_statistic(expected, observed);
    const double critical = chi_square_critical(res.dof, 0.01);
    INFO("chi2=", res.statistic, " dof=", res.dof, " critical=", critical);
    CHECK(res.statistic < critical);
}

TEST_CASE("uniform-walk scaling exponent is 1.00 +- 0.05 at desk scale") {
    ScalingSweepConfig cfg;
    cfg.alphas = {0.0};
    cfg.n_grid = {128, 256, 512, 1024, 2048, 4096};
    cfg.walks_per_cell = 8000;
    cfg.seed = 515;
    cfg.workers = 2;
    const double slope = fit_scaling_exponent(msd_sweep(cfg), 0.0);
    INFO("slope=", slope);
    CHECK(std::abs(slope - 1.0) <= 0.05);
}

TEST_CASE("scaling exponent fit recovers a synthetic power law") {
    MomentCurve curve;
    for (std::int64_t n : {100, 200, 400, 800, 1600, 3200}) {
        MomentCell cell;
        cell.alpha = 0.4;
        cell.n = n;
        cell.mean_msd = 3.7 * std::pow(static_cast<double>(n), 1.37);
        curve.cells.push_back(cell);
    }
    CHECK(fit_scaling_exponent(curve, 0.4) == doctest::Approx(1.37).epsilon(1e-9));
    SUBCASE("too few grid points degenerate") {
        MomentCurve tiny;
        tiny.cells.assign(curve.cells.begin(), curve.cells.begin() + 3);
        CHECK_THROWS_AS(fit_scaling_exponent(tiny, 0.4), DegenerateGrid);
        CHECK_THROWS_AS(fit_scaling_exponent(curve, 0.9), DegenerateGrid);  // no such alpha
    }
}

TEST_CASE("sweep config validation") {
    ScalingSweepConfig cfg;
    cfg.alphas = {0.0};
    cfg.n_grid = {100, 100};
    cfg.walks_per_cell = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n_grid = {100, 200};
    CHECK_NOTHROW(cfg.validate());
    cfg.alphas = {1.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("conditioning mass is monotone in A and saturates") {
    const double alpha = 0.3;
    const std::int64_t n = 500;
    const std::int64_t walks = 10000;
    double previous = -1.0;
    double previous_se = 0.0;
    for (double A : {0.5, 1.0, 2.0, 4.0}) {
        const EstimateResult est = conditioning_mass(alpha, n, A, walks, 616, 2);
        INFO("A=", A, " mass=", est.mean);
        CHECK(est.mean >= previous - 4.0 * (est.std_error + previous_se));
        previous = est.mean;
        previous_se = est.std_error;
    }
    CHECK(previous >= 0.98);  // A = 4 captures essentially everything
}

TEST_CASE("count fluctuation law is stable between n and 2n in the diffusive regime") {
    // n large enough that the count lattice spacing 1/sqrt(n) sits well
    // below the KS critical value; at small n the discreteness floor alone
    // can exceed it.
    const KsStabilityReport rep = count_limit_stability(0.25, 8192, 3000, 0.5, 717, 2);
    CHECK(rep.samples_each == 3000);
    CHECK(rep.critical_1pct == doctest::Approx(ks_critical_value(0.01, 3000, 3000)));
    CHECK(rep.below_critical);
}

TEST_CASE("ks distance and critical value") {
    SUBCASE("identical samples have zero distance") {
        std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        CHECK(ks_distance(a, a) == 0.0);
    }
    SUBCASE("disjoint samples have distance one") {
        CHECK(ks_distance({1.0, 2.0}, {5.0, 6.0}) == 1.0);
    }
    SUBCASE("two-sample critical value at the 1% level") {
        // c(0.01) = sqrt(-ln(0.005)/2) = 1.627625; times sqrt(2/1e4).
        CHECK(ks_critical_value(0.01, 10000, 10000) ==
              doctest::Approx(0.023017).epsilon(1e-4));
    }
}

TEST_CASE("normal quantile and chi-square critical values") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1).epsilon(1e-8));
    // Reference table values; Wilson-Hilferty is good to ~0.1 here.
    CHECK(chi_square_critical(10, 0.01) == doctest::Approx(23.209).epsilon(0.01));
    CHECK(chi_square_critical(100, 0.01) == doctest::Approx(135.807).epsilon(0.005));
}

TEST_CASE("ols slope") {
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{2, 4, 6, 8};
    CHECK(ols_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
    std::vector<double> flat{1, 1, 1, 1};
    CHECK_THROWS_AS(ols_slope(flat, y), DegenerateGrid);
}
