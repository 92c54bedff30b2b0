#include <doctest.h>

#include <cmath>
#include <sstream>

#include "erwlab/errors.hpp"
#include "erwlab/oracle.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/trajectory_io.hpp"
#include "erwlab/walk.hpp"

using namespace erwlab;

TEST_CASE("step law: uniform at the first step for any alpha") {
    DirectionCounts fresh;
    for (double alpha : {-0.25, 0.0, 0.3, 0.9}) {
        const auto q = step_probabilities(fresh, alpha);
        for (int i = 0; i < 4; ++i) CHECK(q[i] == 0.25);
    }
}

TEST_CASE("step law: one recorded step") {
    const DirectionCounts counts({1, 0, 0, 0}, 1);
    SUBCASE("alpha = 0 stays uniform") {
        const auto q = step_probabilities(counts, 0.0);
        for (int i = 0; i < 4; ++i) CHECK(q[i] == 0.25);
    }
    SUBCASE("alpha = 1/4 tilts toward the recorded direction") {
        const auto q = step_probabilities(counts, 0.25);
        CHECK(q[0] == doctest::Approx(0.4375).epsilon(1e-15));
        CHECK(q[1] == doctest::Approx(0.1875).epsilon(1e-15));
        CHECK(q[2] == doctest::Approx(0.1875).epsilon(1e-15));
        CHECK(q[3] == doctest::Approx(0.1875).epsilon(1e-15));
    }
}

TEST_CASE("step law rejects out-of-range memory parameters") {
    DirectionCounts fresh;
    CHECK_THROWS_AS(step_probabilities(fresh, -1.0 / 3.0), std::invalid_argument);
    CHECK_THROWS_AS(step_probabilities(fresh, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(step_probabilities(fresh, -0.4), std::invalid_argument);
    CHECK_THROWS_AS(step_probabilities(fresh, 1.7), std::invalid_argument);
}

TEST_CASE("memory parameter conversion") {
    CHECK(memory_param_to_alpha(1.0) == 1.0);
    CHECK(memory_param_to_alpha(0.25) == 0.0);
    CHECK(memory_param_to_alpha(0.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-16));
    CHECK_THROWS_AS(memory_param_to_alpha(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(memory_param_to_alpha(1.01), std::invalid_argument);
    for (double p : {0.1, 0.25, 0.6, 0.97})
        CHECK(alpha_to_memory_param(memory_param_to_alpha(p)) ==
              doctest::Approx(p).epsilon(1e-14));
}

TEST_CASE("count identity and step-law range along simulated walks") {
    // Property: 4*sum_i D_k(e_i) == 0 in exact integers, every q_i in [0,1],
    // and sum q_i == 1 within 4 ulps, for every prefix of every walk.
    for (double alpha : {-0.3, -0.1, 0.0, 0.25, 0.49, 0.6, 0.95}) {
        Xoshiro256pp rng = substream(42, static_cast<std::uint64_t>(alpha * 1000 + 1000));
        CountingWalker walker(alpha);
        for (int k = 0; k < 2000; ++k) {
            walker.step(rng);
            const DirectionCounts counts = walker.counts();
            REQUIRE(counts.centered4_sum() == 0);
            const auto q = step_probabilities(counts, alpha);
            double sum = 0.0;
            for (int i = 0; i < 4; ++i) {
                REQUIRE(q[i] >= 0.0);
                REQUIRE(q[i] <= 1.0);
                sum += q[i];
            }
            REQUIRE(std::abs(sum - 1.0) <= 4e-16);
        }
    }
}

TEST_CASE("advance: counting sampler keeps state consistent") {
    WalkParams params{0.5, Sampler::Counting, 7, 0};
    Xoshiro256pp rng = substream(params.seed, params.walker_id);
    WalkState state = WalkState::at_origin(false);
    advance(state, params, rng);
    CHECK(state.counts.step_count() == 1);
    CHECK(state.position.norm1() == 1);
    advance(state, params, rng);
    CHECK(state.counts.step_count() == 2);
    CHECK(state.counts.centered4_sum() == 0);
}

TEST_CASE("advance: replay sampler requires a history") {
    WalkParams params{0.5, Sampler::Replay, 7, 0};
    Xoshiro256pp rng = substream(params.seed, params.walker_id);
    WalkState no_history = WalkState::at_origin(false);
    no_history.counts.add(Direction::PlusX);
    no_history.position.move(Direction::PlusX);
    CHECK_THROWS_AS(advance(no_history, params, rng), std::invalid_argument);

    WalkState with_history = WalkState::at_origin(true);
    advance(with_history, params, rng);  // first step needs no former step
    advance(with_history, params, rng);
    CHECK(with_history.history->size() == 2);
    CHECK(with_history.counts.step_count() == 2);
}

TEST_CASE("sampler frequencies converge to the exact path law (chi-square, 1%)") {
    const int m = 5;
    const double alpha = 0.5;
    const PathLaw law = exact_erw_law(alpha, m);
    const std::int64_t n_samples = 1000000;
    std::vector<double> expected(law.size());
    for (std::size_t i = 0; i < law.size(); ++i)
        expected[i] =
            law.probability(static_cast<std::uint32_t>(i)) * static_cast<double>(n_samples);

    for (Sampler sampler : {Sampler::Counting, Sampler::Replay}) {
        std::vector<std::int64_t> observed(law.size(), 0);
        Xoshiro256pp rng = substream(20240811, sampler == Sampler::Replay ? 1 : 0);
        WalkParams params{alpha, sampler, 0, 0};
        for (std::int64_t s = 0; s < n_samples; ++s) {
            WalkState state = WalkState::at_origin(true);
            for (int k = 0; k < m; ++k) advance(state, params, rng);
            ++observed[PathLaw::encode(*state.history)];
        }
        const auto res = chi_square_statistic(expected, observed);
        const double critical = chi_square_critical(res.dof, 0.01);
        INFO("sampler=", sampler_name(sampler), " chi2=", res.statistic, " dof=", res.dof,
             " critical=", critical);
        CHECK(res.statistic < critical);
    }
}

TEST_CASE("run_walk determinism and substream independence") {
    WalkParams params{0.3, Sampler::Counting, 99, 5};
    const Trajectory a = run_walk(params, 3000);
    const Trajectory b = run_walk(params, 3000);
    CHECK(a.steps() == b.steps());

    WalkParams other = params;
    other.walker_id = 6;
    const Trajectory c = run_walk(other, 3000);
    CHECK(a.steps() != c.steps());

    WalkParams replay = params;
    replay.sampler = Sampler::Replay;
    const Trajectory d = run_walk(replay, 3000);
    const Trajectory e = run_walk(replay, 3000);
    CHECK(d.steps() == e.steps());
}

TEST_CASE("run_walk enforces the history cap") {
    WalkParams params{0.3, Sampler::Counting, 1, 0};
    CHECK_THROWS_AS(run_walk(params, 1000, 999), ResourceLimit);
    CHECK_THROWS_AS(run_walk(params, -1), std::invalid_argument);
}

TEST_CASE("trajectory reconstruction is consistent") {
    const Trajectory traj = run_walk({0.25, Sampler::Counting, 3, 1}, 500);
    const auto positions = traj.positions();
    REQUIRE(positions.size() == 501);
    CHECK(positions[0] == LatticePoint{});
    CHECK(positions.back() == traj.final_position());
    CHECK(traj.position_at(250) == positions[250]);
    const DirectionCounts counts = traj.counts_at(500);
    CHECK(counts.step_count() == 500);
    CHECK(counts.centered4_sum() == 0);
    // position equals the signed sum of counted steps
    CHECK(positions.back().x == counts.raw(0) - counts.raw(2));
    CHECK(positions.back().y == counts.raw(1) - counts.raw(3));
}

TEST_CASE("shift_window") {
    const Trajectory traj(std::vector<Direction>{Direction::PlusX, Direction::PlusY});
    SUBCASE("theta = 0 is the identity") {
        const Trajectory s = shift_window(traj, 0);
        CHECK(s.steps() == traj.steps());
        CHECK(s.origin() == LatticePoint{});
    }
    SUBCASE("theta = 1 keeps the recentered suffix") {
        const Trajectory s = shift_window(traj, 1);
        REQUIRE(s.length() == 1);
        CHECK(s.steps()[0] == Direction::PlusY);
        CHECK(s.origin() == LatticePoint{});
    }
    SUBCASE("theta = length is empty") { CHECK(shift_window(traj, 2).length() == 0); }
    SUBCASE("theta out of range throws") {
        CHECK_THROWS_AS(shift_window(traj, 3), std::out_of_range);
    }
}

TEST_CASE("direction basics") {
    CHECK(opposite(Direction::PlusX) == Direction::MinusX);
    CHECK(opposite(Direction::PlusY) == Direction::MinusY);
    CHECK(opposite(Direction::MinusX) == Direction::PlusX);
    CHECK(opposite(Direction::MinusY) == Direction::PlusY);
    LatticePoint p;
    p.move(Direction::PlusX);
    p.move(Direction::MinusY);
    CHECK(p == LatticePoint{1, -1});
    CHECK(p.norm1() == 2);
}

TEST_CASE("direction counts validate their invariant") {
    CHECK_THROWS_AS(DirectionCounts({1, 2, 3, 4}, 11), std::invalid_argument);
    CHECK_THROWS_AS(DirectionCounts({-1, 1, 0, 0}, 0), std::invalid_argument);
    const DirectionCounts ok({2, 1, 0, 1}, 4);
    CHECK(ok.centered4(0) == 4);   // 4*2 - 4
    CHECK(ok.centered4(2) == -4);  // 4*0 - 4
    CHECK(ok.centered4_sum() == 0);
}

TEST_CASE("binary trajectory round-trip") {
    const Trajectory traj = run_walk({0.4, Sampler::Counting, 17, 2}, 1237);
    std::stringstream buf;
    write_trajectory(buf, traj, 0.4);
    const LoadedTrajectory loaded = read_trajectory(buf);
    CHECK(loaded.alpha == 0.4);
    CHECK(loaded.trajectory.steps() == traj.steps());

    std::stringstream bad("NOPE");
    CHECK_THROWS_AS(read_trajectory(bad), IoError);
}

TEST_CASE("counts CSV export") {
    const Trajectory traj(
        std::vector<Direction>{Direction::PlusX, Direction::PlusX, Direction::PlusY});
    std::stringstream out;
    write_counts_csv(out, traj, 1);
    CHECK(out.str() ==
          "k,x,y,n1,n2,n3,n4\n"
          "0,0,0,0,0,0,0\n"
          "1,1,0,1,0,0,0\n"
          "2,2,0,2,0,0,0\n"
          "3,2,1,2,1,0,0\n");
}
