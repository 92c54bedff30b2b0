#include "erwlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "erwlab/csv.hpp"
#include "erwlab/errors.hpp"
#include "erwlab/estimate.hpp"
#include "erwlab/good_events.hpp"
#include "erwlab/heat_kernel.hpp"
#include "erwlab/oracle.hpp"
#include "erwlab/parallel.hpp"
#include "erwlab/params.hpp"
#include "erwlab/restricted.hpp"
#include "erwlab/return_stats.hpp"
#include "erwlab/rng.hpp"
#include "erwlab/scaling.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/trajectory_io.hpp"
#include "erwlab/triadic.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

namespace {

using nlohmann::json;

struct RunContext {
    const ExperimentConfig& cfg;
    std::string hash;
    RunManifest* manifest;
    bool checks_ok = true;

    std::filesystem::path out(const std::string& name) const {
        return cfg.output_dir / name;
    }

    CsvWriter csv(const std::string& name) const {
        CsvWriter w(out(name));
        w.comment("config", hash);
        w.comment("tool", kToolVersion);
        w.comment("experiment", cfg.experiment);
        w.comment("seed", std::to_string(cfg.master_seed));
        manifest->outputs.push_back(name);
        return w;
    }

    void write_json(const std::string& name, json j) const {
        j["config_hash"] = hash;
        j["tool_version"] = kToolVersion;
        j["seed"] = cfg.master_seed;
        std::ofstream out_file(out(name), std::ios::binary);
        if (!out_file) throw IoError("cannot open " + out(name).string());
        out_file << j.dump(2) << '\n';
        manifest->outputs.push_back(name);
    }

    void check(bool ok) {
        if (!ok) checks_ok = false;
    }
};

std::vector<std::int64_t> log_int_grid(std::int64_t lo, std::int64_t hi, int points) {
    if (lo < 1 || hi < lo || points < 2) throw ConfigError("bad horizon grid");
    std::vector<std::int64_t> grid;
    const double la = std::log(static_cast<double>(lo));
    const double lb = std::log(static_cast<double>(hi));
    for (int i = 0; i < points; ++i) {
        const double t = la + (lb - la) * static_cast<double>(i) / (points - 1);
        const auto v = static_cast<std::int64_t>(std::llround(std::exp(t)));
        if (grid.empty() || v > grid.back()) grid.push_back(v);
    }
    return grid;
}


// ---------------------------------------------------------------- simulate

const std::vector<std::string> kSimulateKeys = {
    "alpha", "steps", "walks", "sampler", "stride", "export_binary", "export_csv"};

void run_simulate(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    cfg.require_known_keys(kSimulateKeys);
    const double alpha = cfg.get_double("alpha", 0.3);
    require_alpha(alpha);
    const std::int64_t steps = cfg.get_int("steps", 10000);
    const std::int64_t walks = cfg.get_int("walks", 4);
    if (steps < 0 || walks < 1) throw ConfigError("simulate: steps >= 0 and walks >= 1");
    const std::string sampler_str = cfg.get_string("sampler", "counting");
    if (sampler_str != "counting" && sampler_str != "replay")
        throw ConfigError("simulate: sampler must be counting or replay");
    const Sampler sampler = sampler_str == "replay" ? Sampler::Replay : Sampler::Counting;
    std::int64_t stride = cfg.get_int("stride", 0);
    if (stride <= 0) stride = std::max<std::int64_t>(1, steps / 10);
    if (sampler == Sampler::Replay && steps > kDefaultHistoryCap)
        throw ResourceLimit("replay sampler over the history cap");

    struct Row {
        std::int64_t k;
        LatticePoint pos;
        std::array<std::int64_t, 4> n;
    };
    std::vector<std::vector<Row>> rows(static_cast<std::size_t>(walks));
    std::vector<std::int64_t> violations(static_cast<std::size_t>(walks), 0);

    parallel_for(walks, cfg.workers, [&](std::int64_t w) {
        Xoshiro256pp rng = substream(cfg.master_seed, static_cast<std::uint64_t>(w));
        WalkParams params{alpha, sampler, cfg.master_seed, static_cast<std::uint64_t>(w)};
        WalkState state = WalkState::at_origin(sampler == Sampler::Replay);
        auto& out = rows[static_cast<std::size_t>(w)];
        for (std::int64_t k = 1; k <= steps; ++k) {
            advance(state, params, rng);
            if (k % stride == 0 || k == steps) {
                out.push_back({k, state.position,
                               {state.counts.raw(0), state.counts.raw(1), state.counts.raw(2),
                                state.counts.raw(3)}});
                if (state.counts.centered4_sum() != 0)
                    ++violations[static_cast<std::size_t>(w)];
            }
        }
    });

    auto csv = ctx.csv("simulate_counts.csv");
    csv.comment("alpha", format_double(alpha));
    csv.comment("sampler", sampler_str);
    csv.columns({"walker_id", "k", "x", "y", "n1", "n2", "n3", "n4"});
    for (std::int64_t w = 0; w < walks; ++w)
        for (const auto& r : rows[static_cast<std::size_t>(w)])
            csv.row(w, r.k, r.pos.x, r.pos.y, r.n[0], r.n[1], r.n[2], r.n[3]);

    std::int64_t total_violations = 0;
    for (auto v : violations) total_violations += v;

    if (cfg.get_bool("export_binary", true) || cfg.get_bool("export_csv", true)) {
        const Trajectory traj =
            run_walk({alpha, sampler, cfg.master_seed, 0}, std::min<std::int64_t>(steps, 100000));
        if (cfg.get_bool("export_binary", true)) {
            write_trajectory(ctx.out("simulate_walk0.erwt"), traj, alpha);
            ctx.manifest->outputs.push_back("simulate_walk0.erwt");
        }
        if (cfg.get_bool("export_csv", true)) {
            std::ofstream tcsv(ctx.out("simulate_walk0.csv"), std::ios::binary);
            tcsv << "# config: " << ctx.hash << "\n";
            write_counts_csv(tcsv, traj, stride);
            ctx.manifest->outputs.push_back("simulate_walk0.csv");
        }
    }

    ctx.write_json("simulate_summary.json",
                   json{{"alpha", alpha},
                        {"steps", steps},
                        {"walks", walks},
                        {"sampler", sampler_str},
                        {"stride", stride},
                        {"sum_zero_violations", total_violations}});
    ctx.check(total_violations == 0);
}

// ------------------------------------------------------------------ oracle

const std::vector<std::string> kOracleKeys = {"m", "alphas", "events", "dump_paths", "dump_m"};

void run_oracle(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    cfg.require_known_keys(kOracleKeys);
    const int m = static_cast<int>(cfg.get_int("m", 7));
    if (m < 1 || m > kMaxOraclePathLength) throw ConfigError("oracle: m outside [1,10]");
    const auto alphas = cfg.get_double_list("alphas", {-0.25, 0.0, 0.25, 0.5, 0.75});
    const auto n_events = cfg.get_int("events", 20);

    auto csv = ctx.csv("oracle_checks.csv");
    csv.columns({"alpha", "m", "sampler_max_gap", "rnd_total_gap", "rnd_event_max_gap",
                 "return_probability"});
    double worst_sampler_gap = 0.0, worst_rnd_gap = 0.0;
    for (double alpha : alphas) {
        require_alpha(alpha);
        for (int depth = 1; depth <= m; ++depth) {
            const PathLaw erw = exact_erw_law(alpha, depth);
            const PathLaw replay = exact_replay_law(alpha, depth);
            const double sampler_gap = erw.max_abs_difference(replay);
            const double total_gap = std::abs(exact_rnd_identity(alpha, depth, {}).gap());
            double event_gap = 0.0;
            for (std::int64_t e = 0; e < n_events; ++e) {
                const auto id = exact_rnd_identity(
                    alpha, depth, hashed_path_event(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(e))));
                event_gap = std::max(event_gap, std::abs(id.gap()));
            }
            const double ret = exact_return_probability(alpha, depth);
            csv.row(alpha, depth, sampler_gap, total_gap, event_gap, ret);
            worst_sampler_gap = std::max(worst_sampler_gap, sampler_gap);
            worst_rnd_gap = std::max({worst_rnd_gap, total_gap, event_gap});
        }
    }

    if (cfg.get_bool("dump_paths", false)) {
        const int dump_m = static_cast<int>(cfg.get_int("dump_m", 3));
        if (dump_m > 5) throw ConfigError("oracle: dump_m capped at 5");
        auto dump = ctx.csv("oracle_path_law.csv");
        dump.columns({"alpha", "code", "probability"});
        for (double alpha : alphas) {
            const PathLaw law = exact_erw_law(alpha, dump_m);
            for (std::uint32_t code = 0; code < law.size(); ++code)
                dump.row(alpha, static_cast<std::int64_t>(code), law.probability(code));
        }
    }

    ctx.write_json("oracle_summary.json", json{{"m", m},
                                               {"alphas", alphas},
                                               {"events", n_events},
                                               {"sampler_max_gap", worst_sampler_gap},
                                               {"rnd_max_gap", worst_rnd_gap}});
    ctx.check(worst_sampler_gap <= 1e-12);
    ctx.check(worst_rnd_gap <= 1e-10);
}

// -------------------------------------------------------------- contiguity

const std::vector<std::string> kContiguityKeys = {
    "n",        "alpha",        "epsilon",     "A",        "a_eps",    "windows",
    "prefix_trials", "continuations", "srw_windows", "statistic"};

void run_contiguity(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    cfg.require_known_keys(kContiguityKeys);
    ContiguityConfig ccfg;
    ccfg.n = cfg.get_int("n", 1024);
    ccfg.epsilon = cfg.get_double("epsilon", 0.1);
    ccfg.A = cfg.get_double("A", 1.0);
    ccfg.A_eps = cfg.get_double("a_eps", 0.0);
    ccfg.validate();
    const double alpha = cfg.get_double("alpha", 0.3);
    require_alpha(alpha);
    const std::int64_t windows = cfg.get_int("windows", 20000);
    const std::int64_t prefix_trials = cfg.get_int("prefix_trials", 2000);
    const std::int64_t continuations = cfg.get_int("continuations", 150);
    const std::int64_t srw_windows = cfg.get_int("srw_windows", 150);
    const std::string stat_name = cfg.get_string("statistic", "returns_to_start");
    WindowStatistic statistic;
    if (stat_name == "returns_to_start")
        statistic = window_returns_to_start_statistic();
    else if (stat_name == "ends_near_start")
        statistic = window_ends_near_start_statistic(1.0, ccfg.n);
    else if (stat_name == "one")
        statistic = constant_one_statistic();
    else
        throw ConfigError("contiguity: unknown statistic " + stat_name);

    if (ccfg.A_eps <= 0.0)
        ccfg.A_eps = calibrate_a_eps(ccfg.n, ccfg.epsilon, std::max<std::int64_t>(4000, windows / 8),
                                     derive_seed(cfg.master_seed, 1), cfg.workers);

    const GoodEventReport events =
        estimate_good_events(ccfg, alpha, windows, derive_seed(cfg.master_seed, 10), cfg.workers);
    const MartingaleCheckReport mart =
        martingale_window_check(ccfg, windows, derive_seed(cfg.master_seed, 20), cfg.workers);
    const ContiguityBoundReport bound = verify_contiguity_bound(
        ccfg, alpha, statistic, prefix_trials, continuations, srw_windows,
        derive_seed(cfg.master_seed, 30), cfg.workers);

    auto csv = ctx.csv("contiguity_martingale.csv");
    csv.comment("n", std::to_string(ccfg.n));
    csv.comment("a_eps", format_double(ccfg.A_eps));
    csv.columns({"checkpoint", "m_mean", "m_stderr"});
    for (std::size_t i = 0; i < mart.checkpoints.size(); ++i)
        csv.row(mart.checkpoints[i], mart.m_mean[i], mart.m_stderr[i]);

    // Report schema: config, constant, event masses, both sides, errors, seeds.
    ctx.write_json(
        "contiguity_report.json",
        json{{"config",
              {{"n", ccfg.n},
               {"alpha", alpha},
               {"epsilon", ccfg.epsilon},
               {"A", ccfg.A},
               {"a_eps", ccfg.A_eps},
               {"windows", windows},
               {"prefix_trials", prefix_trials},
               {"continuations", continuations},
               {"srw_windows", srw_windows},
               {"statistic", stat_name}}},
             {"c_lower", bound.c_lower},
             {"p_g", events.p_g},
             {"p_g_stderr", events.p_g_stderr},
             {"p_h", events.p_h},
             {"p_h_stderr", events.p_h_stderr},
             {"p_e", events.p_e},
             {"p_e_stderr", events.p_e_stderr},
             {"lhs_estimate", bound.lhs},
             {"lhs_stderr", bound.lhs_stderr},
             {"rhs_estimate", bound.rhs_raw},
             {"rhs_stderr", bound.rhs_raw_stderr},
             {"bound_margin", bound.margin},
             {"bound_holds", bound.holds},
             {"stopped_m2", mart.stopped_m2_mean},
             {"stopped_m2_bound", mart.bound},
             {"martingale_mean_within_4se", mart.mean_within_4se},
             {"prefixes_used", bound.prefixes_used},
             {"accepted_windows", mart.windows}});

    ctx.check(mart.mean_within_4se);
    ctx.check(mart.stopped_m2_ok);
    ctx.check(bound.holds);
    ctx.check(events.p_e >= events.p_g + events.p_h - 1.0 -
                  4.0 * (events.p_g_stderr + events.p_h_stderr + events.p_e_stderr));
}

// -------------------------------------------------------------- recurrence

const std::vector<std::string> kRecurrenceKeys = {
    "mode",   "alphas", "alpha",    "n_list", "A",     "epsilon", "samples",       "trials",
    "j_min",  "j_max",  "prefixes", "r0",     "r_cap", "delta_j", "dp_check_max_n"};

void run_recurrence_visits(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const auto n_list = cfg.get_int_list("n_list", {256, 512, 1024, 2048, 4096, 8192});
    const double A = cfg.get_double("A", 1.0);
    const double epsilon = cfg.get_double("epsilon", 0.05);
    const std::int64_t samples = cfg.get_int("samples", 100000);

    const SecondMomentReport report = second_moment_report(
        n_list, A, epsilon, samples, derive_seed(cfg.master_seed, 40), cfg.workers);

    auto csv = ctx.csv("recurrence_visits.csv");
    csv.columns({"n", "x", "y", "e_n", "e_n_stderr", "e_n2", "e_n2_stderr", "p_pos",
                 "p_pos_stderr", "pz_lower", "e_n2_over_log_n", "samples"});
    for (const auto& cell : report.cells)
        csv.row(cell.n, cell.x.x, cell.x.y, cell.e_n, cell.e_n_stderr, cell.e_n2,
                cell.e_n2_stderr, cell.p_pos, cell.p_pos_stderr, cell.pz_lower,
                cell.e_n2_over_log_n, cell.samples);

    // Bounded-ratio gate: the per-cell ratio at the top scale must not
    // exceed 1.25x the largest ratio seen in the lower half of the grid.
    double lower_half_max = 0.0, top_max = 0.0;
    const std::int64_t split = n_list[(n_list.size() - 1) / 2];
    for (const auto& cell : report.cells) {
        if (cell.n <= split) lower_half_max = std::max(lower_half_max, cell.e_n2_over_log_n);
        if (cell.n == n_list.back()) top_max = std::max(top_max, cell.e_n2_over_log_n);
    }
    const bool ratio_bounded = top_max <= 1.25 * lower_half_max;
    const bool mean_positive = report.min_e_n >= 0.01;

    ctx.write_json("recurrence_visits_summary.json",
                   json{{"n_list", n_list},
                        {"A", A},
                        {"epsilon", epsilon},
                        {"samples", samples},
                        {"max_e_n2_over_log_n", report.max_e_n2_over_log_n},
                        {"lower_half_max_ratio", lower_half_max},
                        {"top_max_ratio", top_max},
                        {"ratio_bounded", ratio_bounded},
                        {"min_e_n", report.min_e_n},
                        {"mean_positive", mean_positive},
                        {"paley_zygmund_ok", report.paley_zygmund_ok}});
    ctx.check(ratio_bounded);
    ctx.check(mean_positive);
    ctx.check(report.paley_zygmund_ok);
}

void run_recurrence_returns(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const auto alphas = cfg.get_double_list("alphas", {0.0, 0.3});
    const auto n_list = cfg.get_int_list("n_list", {243, 729, 2187, 6561});
    const double A = cfg.get_double("A", 1.0);
    const std::int64_t trials = cfg.get_int("trials", 30000);
    const std::int64_t dp_check_max_n = cfg.get_int("dp_check_max_n", 256);

    auto csv = ctx.csv("recurrence_returns.csv");
    csv.columns({"alpha", "n", "window_begin", "window_end", "accepted", "trials", "p_hat",
                 "p_stderr", "logn_p"});
    json dp_checks = json::array();
    bool band_ok = true, dp_ok = true;
    std::uint64_t stage = 0;
    for (double alpha : alphas) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::int64_t n : n_list) {
            const auto est = window_return_probability_erw(
                alpha, n, A, trials, derive_seed(cfg.master_seed, 50 + stage++), cfg.workers);
            csv.row(alpha, n, est.window_begin, est.window_end, est.accepted, est.trials,
                    est.p_hat, est.std_error, est.logn_scaled);
            lo = std::min(lo, est.logn_scaled);
            hi = std::max(hi, est.logn_scaled);
            if (alpha == 0.0 && n <= dp_check_max_n) {
                const double exact =
                    srw_conditional_window_return(n, A, est.window_begin, est.window_end);
                const bool ok = std::abs(est.p_hat - exact) <= 4.0 * est.std_error;
                dp_checks.push_back(json{{"n", n},
                                         {"p_hat", est.p_hat},
                                         {"exact", exact},
                                         {"within_4se", ok}});
                dp_ok = dp_ok && ok;
            }
        }
        if (hi > 3.0 * lo) band_ok = false;
    }

    ctx.write_json("recurrence_returns_summary.json", json{{"alphas", alphas},
                                                          {"n_list", n_list},
                                                          {"A", A},
                                                          {"trials", trials},
                                                          {"band_within_factor_3", band_ok},
                                                          {"dp_cross_checks", dp_checks},
                                                          {"dp_ok", dp_ok}});
    ctx.check(band_ok);
    ctx.check(dp_ok);
}

void run_recurrence_triadic(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const double alpha = cfg.get_double("alpha", 0.3);
    require_alpha(alpha);
    const int j_min = static_cast<int>(cfg.get_int("j_min", 1));
    const int j_max = static_cast<int>(cfg.get_int("j_max", 8));
    if (j_min < 1 || j_max < j_min || j_max > kMaxTriadicLevel)
        throw ConfigError("recurrence: bad triadic level range");
    const std::int64_t prefixes = cfg.get_int("prefixes", 400);
    const std::int64_t r0 = cfg.get_int("r0", 400);
    const int delta_j = static_cast<int>(cfg.get_int("delta_j", std::min(4, j_max)));
    if (delta_j < j_min || delta_j > j_max)
        throw ConfigError("recurrence: delta_j outside level range");

    // Pilot at the delta level fixes the threshold, then the per-level
    // continuation count is sized so inner estimates resolve delta/j, up to
    // the r_cap runtime guard (the threshold can sit deep in the lower tail
    // when a few prefixes drift far out, where full resolution is moot).
    const std::int64_t r_cap = cfg.get_int("r_cap", 4000);
    const DyadicReturnRecord pilot = triadic_window_scan(
        alpha, delta_j, prefixes, r0, derive_seed(cfg.master_seed, 70), cfg.workers);
    const DivergenceReport pilot_rep = cumulative_return_divergence({&pilot, 1}, delta_j);
    const double delta = std::max(pilot_rep.delta, 1e-6);

    std::vector<DyadicReturnRecord> records;
    for (int j = j_min; j <= j_max; ++j) {
        const auto resolve = static_cast<std::int64_t>(
            std::ceil(30.0 * static_cast<double>(j) / delta));
        const auto r = std::max(r0, std::min(r_cap, resolve));
        records.push_back(triadic_window_scan(alpha, j, prefixes, r,
                                              derive_seed(cfg.master_seed, 80 + static_cast<std::uint64_t>(j)),
                                              cfg.workers));
    }
    const DivergenceReport rep = cumulative_return_divergence(records, delta_j);

    auto csv = ctx.csv("recurrence_triadic.csv");
    csv.columns({"alpha", "j", "prefix_id", "p_hat_inner", "hit_count", "trials"});
    for (const auto& rec : records)
        for (const auto& pre : rec.prefixes)
            csv.row(alpha, rec.j, pre.prefix_id, pre.p_hat_inner, pre.hit_count, pre.trials);

    auto scsv = ctx.csv("recurrence_triadic_summary.csv");
    scsv.comment("delta", format_double(rep.delta));
    scsv.comment("delta_j", std::to_string(rep.delta_j));
    scsv.columns({"alpha", "j", "p_mean", "partial_sum", "frac_above_delta",
                  "required_increment"});
    bool frac_ok = true;
    for (std::size_t i = 0; i < rep.js.size(); ++i) {
        scsv.row(alpha, rep.js[i], rep.p_means[i], rep.partial_sums[i], rep.frac_above_delta[i],
                 rep.required_increment[i]);
        if (rep.js[i] >= rep.delta_j && rep.frac_above_delta[i] < 0.8) frac_ok = false;
    }

    ctx.write_json("recurrence_triadic_summary.json",
                   json{{"alpha", alpha},
                        {"j_min", j_min},
                        {"j_max", j_max},
                        {"prefixes", prefixes},
                        {"delta", rep.delta},
                        {"delta_j", rep.delta_j},
                        {"partial_sums", rep.partial_sums},
                        {"frac_above_delta", rep.frac_above_delta},
                        {"frac_above_ok", frac_ok},
                        {"increments_ok", rep.increments_ok}});
    ctx.check(frac_ok);
    ctx.check(rep.increments_ok);
}

void run_recurrence(RunContext& ctx) {
    ctx.cfg.require_known_keys(kRecurrenceKeys);
    const std::string mode = ctx.cfg.get_string("mode", "returns");
    if (mode == "visits")
        run_recurrence_visits(ctx);
    else if (mode == "returns")
        run_recurrence_returns(ctx);
    else if (mode == "triadic")
        run_recurrence_triadic(ctx);
    else
        throw ConfigError("recurrence: mode must be visits, returns or triadic");
}

// ----------------------------------------------------------------- scaling

const std::vector<std::string> kScalingKeys = {
    "alphas", "n_list", "n_min",    "n_max",    "n_points", "walks_per_cell", "ks",
    "ks_alphas", "ks_n", "ks_walks", "cond_alpha", "cond_n", "cond_A_list", "cond_walks"};

void run_scaling(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    cfg.require_known_keys(kScalingKeys);
    ScalingSweepConfig sweep;
    sweep.alphas = cfg.get_double_list("alphas", {0.0, 0.25, 0.75});
    if (cfg.has("n_list"))
        sweep.n_grid = cfg.get_int_list("n_list", {});
    else
        sweep.n_grid = log_int_grid(cfg.get_int("n_min", 100), cfg.get_int("n_max", 100000),
                                    static_cast<int>(cfg.get_int("n_points", 10)));
    sweep.walks_per_cell = cfg.get_int("walks_per_cell", 10000);
    sweep.seed = derive_seed(cfg.master_seed, 90);
    sweep.workers = cfg.workers;

    const MomentCurve curve = msd_sweep(sweep);

    auto csv = ctx.csv("scaling_msd.csv");
    csv.columns({"alpha", "n", "mean_msd", "stderr", "d1_mean", "d2_mean", "d3_mean", "d4_mean",
                 "d1_var", "samples"});
    for (const auto& cell : curve.cells)
        csv.row(cell.alpha, cell.n, cell.mean_msd, cell.msd_stderr, cell.d_mean[0],
                cell.d_mean[1], cell.d_mean[2], cell.d_mean[3], cell.d1_var, cell.samples);

    json exponents = json::array();
    bool exponent_ok = true;
    for (double alpha : sweep.alphas) {
        const double slope = fit_scaling_exponent(curve, alpha);
        const bool near_critical = std::abs(alpha - 0.5) < 0.05;
        bool ok = true;
        if (!near_critical) {
            // Diffusive cells must fit a unit slope; superdiffusive ones
            // must clear 2*alpha_c + margin.
            ok = alpha < 0.5 ? std::abs(slope - 1.0) <= 0.1 : slope >= 1.3;
            exponent_ok = exponent_ok && ok;
        }
        exponents.push_back(json{{"alpha", alpha},
                                 {"exponent", slope},
                                 {"near_critical", near_critical},
                                 {"ok", ok}});
    }

    // alpha = 0 sanity: E||X_n||^2 = n exactly for the uniform walk.
    bool srw_msd_ok = true;
    for (const auto& cell : curve.cells)
        if (cell.alpha == 0.0 &&
            std::abs(cell.mean_msd - static_cast<double>(cell.n)) > 4.0 * cell.msd_stderr)
            srw_msd_ok = false;

    json ks_report = json::array();
    bool ks_ok = true;
    if (cfg.get_bool("ks", true)) {
        const auto ks_alphas = cfg.get_double_list("ks_alphas", {0.25, 0.75});
        const std::int64_t ks_n = cfg.get_int("ks_n", 10000);
        const std::int64_t ks_walks = cfg.get_int("ks_walks", 10000);
        auto kcsv = ctx.csv("scaling_ks.csv");
        kcsv.columns({"alpha", "n", "exponent", "ks", "critical_1pct", "below_critical",
                      "samples_each"});
        std::uint64_t stage = 0;
        for (double alpha : ks_alphas) {
            const double exponent = alpha < 0.5 ? 0.5 : alpha;
            const auto rep = count_limit_stability(alpha, ks_n, ks_walks, exponent,
                                                   derive_seed(cfg.master_seed, 300 + stage++),
                                                   cfg.workers);
            kcsv.row(rep.alpha, rep.n, rep.exponent, rep.ks, rep.critical_1pct,
                     rep.below_critical, rep.samples_each);
            ks_report.push_back(json{{"alpha", alpha},
                                     {"n", rep.n},
                                     {"exponent", rep.exponent},
                                     {"ks", rep.ks},
                                     {"critical_1pct", rep.critical_1pct},
                                     {"below_critical", rep.below_critical},
                                     {"asserted", alpha < 0.5}});
            // Above the transition the distance is reported, not gated.
            if (alpha < 0.5 && !rep.below_critical) ks_ok = false;
        }
    }

    if (cfg.has("cond_A_list") || cfg.has("cond_n")) {
        const double cond_alpha = cfg.get_double("cond_alpha", 0.3);
        const std::int64_t cond_n = cfg.get_int("cond_n", 1024);
        const std::int64_t cond_walks = cfg.get_int("cond_walks", 20000);
        const auto a_list = cfg.get_double_list("cond_A_list", {0.25, 0.5, 1.0, 2.0, 4.0});
        auto ccsv = ctx.csv("scaling_conditioning.csv");
        ccsv.columns({"alpha", "n", "A", "mass", "stderr", "samples"});
        std::uint64_t stage = 0;
        for (double a : a_list) {
            const auto est = conditioning_mass(cond_alpha, cond_n, a, cond_walks,
                                               derive_seed(cfg.master_seed, 400 + stage++),
                                               cfg.workers);
            ccsv.row(cond_alpha, cond_n, a, est.mean, est.std_error, est.count);
        }
    }

    ctx.write_json("scaling_summary.json", json{{"alphas", sweep.alphas},
                                                {"n_grid", sweep.n_grid},
                                                {"walks_per_cell", sweep.walks_per_cell},
                                                {"exponents", exponents},
                                                {"exponents_ok", exponent_ok},
                                                {"srw_msd_ok", srw_msd_ok},
                                                {"ks", ks_report},
                                                {"ks_ok", ks_ok}});
    ctx.check(exponent_ok);
    ctx.check(srw_msd_ok);
    ctx.check(ks_ok);
}

// ----------------------------------------------------------------- kernels

const std::vector<std::string> kKernelsKeys = {
    "k_max", "sum_n", "green_n", "overlap_n", "overlap_A", "deficit_n", "deficit_samples",
    "deficit_epsilon", "export_kernel_k", "export_green"};

void run_kernels(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    cfg.require_known_keys(kKernelsKeys);
    const int k_max = static_cast<int>(cfg.get_int("k_max", 2048));
    if (k_max < 2) throw ConfigError("kernels: k_max >= 2");
    const int green_n = static_cast<int>(cfg.get_int("green_n", 256));
    const int overlap_n = static_cast<int>(cfg.get_int("overlap_n", 256));
    const auto overlap_A = cfg.get_double_list("overlap_A", {1.0, 2.0});
    const int deficit_n = static_cast<int>(cfg.get_int("deficit_n", 400));
    const std::int64_t deficit_samples = cfg.get_int("deficit_samples", 20000);
    const double deficit_epsilon = cfg.get_double("deficit_epsilon", 0.1);

    // Bound constant and its stability across the top octave.
    const auto seq = heat_kernel_bound_sequence(k_max, std::max(k_max, kDefaultKernelCap));
    auto bcsv = ctx.csv("kernels_bound.csv");
    bcsv.columns({"k", "k_times_max_p"});
    for (std::size_t i = 0; i < seq.size(); ++i)
        bcsv.row(static_cast<std::int64_t>(i + 1), seq[i]);
    const double c_constant = *std::max_element(seq.begin(), seq.end());
    double oct_lo = std::numeric_limits<double>::infinity(), oct_hi = 0.0;
    for (int k = k_max / 2; k <= k_max; ++k) {
        const double v = seq[static_cast<std::size_t>(k - 1)];
        oct_lo = std::min(oct_lo, v);
        oct_hi = std::max(oct_hi, v);
    }
    const double stability = oct_hi / oct_lo;

    // Green-window mass identity.
    const GreenFunctionTable green = green_function(green_n);
    const double green_mass = green.total_mass();
    const double green_mass_expected = static_cast<double>(green.window_length());
    const bool green_mass_ok = std::abs(green_mass - green_mass_expected) <= 1e-9;

    const int sum_n = static_cast<int>(cfg.get_int("sum_n", 100));
    const double kernel_mass = heat_kernel(sum_n).values.total_mass();
    const bool kernel_mass_ok = std::abs(kernel_mass - 1.0) <= 1e-12;

    // Overlap lower bound over the target grid, per A.
    const HeatKernelTable p_n = heat_kernel(overlap_n);
    const GreenFunctionTable g_n = green_function(overlap_n);
    json overlaps = json::array();
    double overlap_min = std::numeric_limits<double>::infinity();
    auto ocsv = ctx.csv("kernels_overlap.csv");
    ocsv.columns({"n", "A", "x", "y", "overlap"});
    for (double a : overlap_A) {
        double local_min = std::numeric_limits<double>::infinity();
        for (const auto& x : target_grid(a * std::sqrt(static_cast<double>(overlap_n)))) {
            const double v = kernel_green_overlap(p_n, g_n, x);
            ocsv.row(overlap_n, a, x.x, x.y, v);
            local_min = std::min(local_min, v);
        }
        overlaps.push_back(json{{"A", a}, {"c_A", local_min}});
        overlap_min = std::min(overlap_min, local_min);
    }

    // L1 deficits under the calibrated sup-bound predicate.
    const double a_eps = calibrate_a_eps(deficit_n, deficit_epsilon, 4000,
                                         derive_seed(cfg.master_seed, 500), cfg.workers);
    const EventPredicate predicate =
        count_sup_within(a_eps * std::sqrt(static_cast<double>(deficit_n)));
    const L1Deficits deficits = l1_deficits(deficit_n, predicate, deficit_samples,
                                            derive_seed(cfg.master_seed, 501), cfg.workers);
    const bool deficit_ok =
        deficits.kernel_deficit <=
            (1.0 - deficits.event_probability) + 4.0 * deficits.event_std_error &&
        deficits.green_deficit <= static_cast<double>(deficit_n) * deficits.kernel_deficit +
                                      1e-12;

    if (cfg.has("export_kernel_k") || cfg.get_bool("export_green", false)) {
        auto tcsv = ctx.csv("kernels_tables.csv");
        tcsv.columns({"kind", "k_or_n", "x", "y", "value"});
        for (std::int64_t k : cfg.get_int_list("export_kernel_k", {0, 1, 2, 8})) {
            const HeatKernelTable table = heat_kernel(static_cast<int>(k));
            table.values.for_each([&](LatticePoint p, double v) {
                if (v != 0.0) tcsv.row("kernel", k, p.x, p.y, v);
            });
        }
        if (cfg.get_bool("export_green", false)) {
            for (int parity = 0; parity < 2; ++parity)
                green.parity_layer(parity).for_each([&](LatticePoint p, double v) {
                    if (v != 0.0) tcsv.row("green", static_cast<std::int64_t>(green_n), p.x, p.y, v);
                });
        }
    }

    ctx.write_json("kernels_summary.json",
                   json{{"k_max", k_max},
                        {"bound_constant", c_constant},
                        {"top_octave_stability", stability},
                        {"stability_ok", stability <= 1.05},
                        {"green_n", green_n},
                        {"green_mass", green_mass},
                        {"green_mass_expected", green_mass_expected},
                        {"green_mass_ok", green_mass_ok},
                        {"kernel_mass_n", sum_n},
                        {"kernel_mass", kernel_mass},
                        {"kernel_mass_ok", kernel_mass_ok},
                        {"overlap_n", overlap_n},
                        {"overlaps", overlaps},
                        {"overlap_min", overlap_min},
                        {"overlap_positive", overlap_min > 0.0},
                        {"deficit",
                         {{"n", deficit_n},
                          {"a_eps", a_eps},
                          {"kernel_deficit", deficits.kernel_deficit},
                          {"green_deficit", deficits.green_deficit},
                          {"event_probability", deficits.event_probability},
                          {"window_length", deficits.window_length},
                          {"ok", deficit_ok}}}});
    ctx.check(stability <= 1.05);
    ctx.check(green_mass_ok);
    ctx.check(kernel_mass_ok);
    ctx.check(overlap_min > 0.0);
    ctx.check(deficit_ok);
}

}  // namespace

RunManifest run(const ExperimentConfig& cfg) {
    if (!is_known_experiment(cfg.experiment))
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    std::filesystem::create_directories(cfg.output_dir);

    RunManifest manifest;
    manifest.config_hash = cfg.hash();
    manifest.tool_version = kToolVersion;
    manifest.experiment = cfg.experiment;
    manifest.master_seed = cfg.master_seed;
    manifest.workers = cfg.workers;
    manifest.params = cfg.params;

    RunContext ctx{cfg, manifest.config_hash, &manifest};
    const auto start = std::chrono::steady_clock::now();
    if (cfg.experiment == "simulate")
        run_simulate(ctx);
    else if (cfg.experiment == "oracle")
        run_oracle(ctx);
    else if (cfg.experiment == "contiguity")
        run_contiguity(ctx);
    else if (cfg.experiment == "recurrence")
        run_recurrence(ctx);
    else if (cfg.experiment == "scaling")
        run_scaling(ctx);
    else if (cfg.experiment == "kernels")
        run_kernels(ctx);
    manifest.checks_passed = ctx.checks_ok;
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json j{{"config_hash", manifest.config_hash},
           {"tool_version", manifest.tool_version},
           {"experiment", manifest.experiment},
           {"master_seed", manifest.master_seed},
           {"workers", manifest.workers},
           {"wall_time_s", manifest.wall_time_s},
           {"outputs", manifest.outputs},
           {"params", manifest.params},
           {"checks_passed", manifest.checks_passed}};
    manifest.path = cfg.output_dir / ("manifest_" + cfg.experiment + ".json");
    std::ofstream out(manifest.path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest " + manifest.path.string());
    out << j.dump(2) << '\n';
    return manifest;
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    json j;
    in >> j;
    RunManifest m;
    m.config_hash = j.value("config_hash", "");
    m.tool_version = j.value("tool_version", "");
    m.experiment = j.value("experiment", "");
    m.master_seed = j.value("master_seed", std::uint64_t{0});
    m.workers = j.value("workers", 1);
    m.wall_time_s = j.value("wall_time_s", 0.0);
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.params = j.value("params", std::map<std::string, std::string>{});
    m.checks_passed = j.value("checks_passed", true);
    m.path = path;
    return m;
}

namespace {

struct CsvData {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw IoError("column '" + name + "' missing from experiment output");
    }
};

CsvData parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvData data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (data.columns.empty())
            data.columns = std::move(cells);
        else
            data.rows.push_back(std::move(cells));
    }
    return data;
}

}  // namespace

std::filesystem::path emit_plot_data(const std::filesystem::path& manifest_path,
                                     const std::string& plot) {
    const RunManifest manifest = read_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();
    const auto require_output = [&](const std::string& name) {
        if (std::find(manifest.outputs.begin(), manifest.outputs.end(), name) ==
            manifest.outputs.end())
            throw IoError("manifest has no output '" + name + "'; run the experiment first");
        return dir / name;
    };

    const auto plot_path = dir / ("plot_" + plot + ".csv");
    CsvWriter out(plot_path);
    out.comment("config", manifest.config_hash);
    out.comment("plot", plot);

    if (plot == "msd") {
        const CsvData data = parse_csv(require_output("scaling_msd.csv"));
        const int ca = data.col("alpha"), cn = data.col("n"), cy = data.col("mean_msd"),
                  ce = data.col("stderr");
        out.columns({"series", "x", "y", "yerr"});
        for (const auto& r : data.rows)
            out.row(r[static_cast<std::size_t>(ca)], r[static_cast<std::size_t>(cn)],
                    r[static_cast<std::size_t>(cy)], r[static_cast<std::size_t>(ce)]);
    } else if (plot == "return") {
        const CsvData data = parse_csv(require_output("recurrence_returns.csv"));
        const int ca = data.col("alpha"), cn = data.col("n"), cy = data.col("logn_p"),
                  cp = data.col("p_stderr");
        out.columns({"series", "x", "y", "yerr"});
        for (const auto& r : data.rows) {
            const double n = std::stod(r[static_cast<std::size_t>(cn)]);
            const double se = std::stod(r[static_cast<std::size_t>(cp)]) * std::log(n);
            out.row(r[static_cast<std::size_t>(ca)], r[static_cast<std::size_t>(cn)],
                    r[static_cast<std::size_t>(cy)], format_double(se));
        }
    } else if (plot == "triadic") {
        const CsvData data = parse_csv(require_output("recurrence_triadic_summary.csv"));
        const int ca = data.col("alpha"), cj = data.col("j"), cp = data.col("p_mean");
        out.columns({"series", "x", "y"});
        for (const auto& r : data.rows) {
            const double j = std::stod(r[static_cast<std::size_t>(cj)]);
            const double p = std::stod(r[static_cast<std::size_t>(cp)]);
            out.row(r[static_cast<std::size_t>(ca)], r[static_cast<std::size_t>(cj)],
                    format_double(j * p));
        }
    } else if (plot == "ks") {
        const CsvData data = parse_csv(require_output("scaling_ks.csv"));
        const int ca = data.col("alpha"), cn = data.col("n"), ck = data.col("ks"),
                  cc = data.col("critical_1pct");
        out.columns({"series", "x", "y", "critical"});
        for (const auto& r : data.rows)
            out.row(r[static_cast<std::size_t>(ca)], r[static_cast<std::size_t>(cn)],
                    r[static_cast<std::size_t>(ck)], r[static_cast<std::size_t>(cc)]);
    } else {
        throw UnknownPlot("unknown plot '" + plot + "' (msd|return|triadic|ks)");
    }
    out.flush();
    return plot_path;
}

void validate(const ExperimentConfig& cfg, std::ostream& out) {
    if (!is_known_experiment(cfg.experiment))
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");

    std::vector<std::pair<std::string, std::string>> table;
    const auto add = [&table](const std::string& k, const std::string& v) {
        table.emplace_back(k, v);
    };
    add("experiment", cfg.experiment);
    add("seed", std::to_string(cfg.master_seed));
    add("workers", std::to_string(cfg.workers));
    add("output_dir", cfg.output_dir.string());
    add("config_hash", cfg.hash());

    if (cfg.experiment == "simulate") {
        cfg.require_known_keys(kSimulateKeys);
        const double alpha = cfg.get_double("alpha", 0.3);
        require_alpha(alpha);
        const std::int64_t steps = cfg.get_int("steps", 10000);
        std::int64_t stride = cfg.get_int("stride", 0);
        if (stride <= 0) stride = std::max<std::int64_t>(1, steps / 10);
        add("alpha", format_double(alpha));
        add("p (derived)", format_double(alpha_to_memory_param(alpha)));
        add("steps", std::to_string(steps));
        add("walks", std::to_string(cfg.get_int("walks", 4)));
        add("sampler", cfg.get_string("sampler", "counting"));
        add("stride (derived)", std::to_string(stride));
    } else if (cfg.experiment == "oracle") {
        cfg.require_known_keys(kOracleKeys);
        add("m", std::to_string(cfg.get_int("m", 7)));
        add("events", std::to_string(cfg.get_int("events", 20)));
    } else if (cfg.experiment == "contiguity") {
        cfg.require_known_keys(kContiguityKeys);
        ContiguityConfig ccfg;
        ccfg.n = cfg.get_int("n", 1024);
        ccfg.epsilon = cfg.get_double("epsilon", 0.1);
        ccfg.A = cfg.get_double("A", 1.0);
        ccfg.A_eps = cfg.get_double("a_eps", 0.0);
        ccfg.validate();
        const double alpha = cfg.get_double("alpha", 0.3);
        require_alpha(alpha);
        add("n", std::to_string(ccfg.n));
        add("alpha", format_double(alpha));
        add("p (derived)", format_double(alpha_to_memory_param(alpha)));
        add("epsilon", format_double(ccfg.epsilon));
        add("A", format_double(ccfg.A));
        add("a_eps", ccfg.A_eps > 0 ? format_double(ccfg.A_eps) : "(calibrated at runtime)");
        add("window (derived)", "[" + std::to_string(ccfg.n) + ", " +
                                    std::to_string(2 * ccfg.n) + ")");
        if (ccfg.A_eps > 0)
            add("c_lower (derived)", format_double(contiguity_constant(ccfg, alpha)));
    } else if (cfg.experiment == "recurrence") {
        cfg.require_known_keys(kRecurrenceKeys);
        const std::string mode = cfg.get_string("mode", "returns");
        add("mode", mode);
        if (mode == "visits") {
            const auto n_list = cfg.get_int_list("n_list", {256, 512, 1024, 2048, 4096, 8192});
            for (std::int64_t n : n_list)
                add("window @ n=" + std::to_string(n),
                    "[" + std::to_string((3 * n + 1) / 2) + ", " + std::to_string(2 * n) + "]");
        } else if (mode == "returns") {
            const auto n_list = cfg.get_int_list("n_list", {243, 729, 2187, 6561});
            for (std::int64_t n : n_list)
                add("window @ n=" + std::to_string(n),
                    "[" + std::to_string((5 * n + 1) / 2) + ", " + std::to_string(3 * n) + "]");
        } else if (mode == "triadic") {
            const int j_max = static_cast<int>(cfg.get_int("j_max", 8));
            std::int64_t w = 3;
            for (int j = 1; j <= j_max; ++j) {
                add("window @ j=" + std::to_string(j),
                    "[" + std::to_string(w) + ", " + std::to_string(3 * w) + "]");
                w *= 3;
            }
        } else {
            throw ConfigError("recurrence: mode must be visits, returns or triadic");
        }
    } else if (cfg.experiment == "scaling") {
        cfg.require_known_keys(kScalingKeys);
        std::vector<std::int64_t> grid;
        if (cfg.has("n_list"))
            grid = cfg.get_int_list("n_list", {});
        else
            grid = log_int_grid(cfg.get_int("n_min", 100), cfg.get_int("n_max", 100000),
                                static_cast<int>(cfg.get_int("n_points", 10)));
        std::string gs;
        for (std::size_t i = 0; i < grid.size(); ++i)
            gs += (i ? "," : "") + std::to_string(grid[i]);
        add("n grid (derived)", gs);
        add("walks_per_cell", std::to_string(cfg.get_int("walks_per_cell", 10000)));
    } else if (cfg.experiment == "kernels") {
        cfg.require_known_keys(kKernelsKeys);
        const int k_max = static_cast<int>(cfg.get_int("k_max", 2048));
        add("k_max", std::to_string(k_max));
        add("stability octave (derived)",
            "[" + std::to_string(k_max / 2) + ", " + std::to_string(k_max) + "]");
        const int green_n = static_cast<int>(cfg.get_int("green_n", 256));
        add("green window (derived)", "[" + std::to_string((green_n + 1) / 2) + ", " +
                                          std::to_string(green_n) + "]");
    }

    std::size_t width = 0;
    for (const auto& [k, v] : table) width = std::max(width, k.size());
    for (const auto& [k, v] : table)
        out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
}

}  // namespace erwlab
