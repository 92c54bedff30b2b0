#include "erwlab/good_events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erwlab/errors.hpp"
#include "erwlab/estimate.hpp"
#include "erwlab/parallel.hpp"
#include "erwlab/rng.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

namespace {

// Running state of one window pass: window counts (as 4*D integers), the
// count martingale against a fixed prefix snapshot, and the first time the
// window sup bound is exceeded.
struct WindowTracker {
    std::int64_t wcount[4] = {0, 0, 0, 0};
    std::int64_t k = 0;
    double m = 0.0;
    double qv_stopped = 0.0;
    double m_at_stop = 0.0;
    std::int64_t theta;  // stop time; n if never exceeded
    bool stopped = false;

    explicit WindowTracker(std::int64_t n) : theta(n) {}

    // Applies one window step given the snapshot (4*D at time n) and the
    // exceedance threshold on 4*|D^window|.
    void apply(Direction d, const std::int64_t snap_c4[4], std::int64_t n, double threshold4) {
        const int di = direction_index(d);
        const auto t = static_cast<double>(n + k);
        if (!stopped) {
            // QV increment of the *total* counts before this step.
            double sum = 0.0;
            for (int i = 0; i < 4; ++i) {
                const auto c4 =
                    static_cast<double>(snap_c4[i] + 4 * wcount[i] - k);
                sum += c4 * c4;
            }
            qv_stopped += sum / (64.0 * t * t);
        }
        const auto c4_step = static_cast<double>(snap_c4[di] + 4 * wcount[di] - k);
        m += 0.25 * c4_step / t;
        ++wcount[di];
        ++k;
        if (!stopped) {
            for (int i = 0; i < 4; ++i) {
                const auto wc4 = static_cast<double>(4 * wcount[i] - k);
                if (wc4 > threshold4 || -wc4 > threshold4) {
                    stopped = true;
                    theta = k;
                    m_at_stop = m;
                    break;
                }
            }
        }
    }

    double stopped_m(double m_final) const { return stopped ? m_at_stop : m_final; }
    bool sup_ok() const { return !stopped; }
};

}  // namespace

double calibrate_a_eps(std::int64_t n, double epsilon, std::int64_t n_samples,
                       std::uint64_t seed, int workers) {
    if (n < 1) throw std::invalid_argument("calibrate_a_eps: n >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("calibrate_a_eps: epsilon in (0,1)");
    if (n_samples < 16) throw std::invalid_argument("calibrate_a_eps: too few samples");

    std::vector<std::int64_t> sup4(static_cast<std::size_t>(n_samples));
    parallel_for_chunks(n_samples, workers, 64, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            std::int64_t counts[4] = {0, 0, 0, 0};
            std::int64_t worst = 0;
            for (std::int64_t k = 1; k <= n; ++k) {
                ++counts[rng.direction4()];
                for (int i = 0; i < 4; ++i) {
                    const std::int64_t c4 = 4 * counts[i] - k;
                    const std::int64_t a = c4 < 0 ? -c4 : c4;
                    if (a > worst) worst = a;
                }
            }
            sup4[static_cast<std::size_t>(w)] = worst;
        }
    });
    std::sort(sup4.begin(), sup4.end());
    const double se = std::sqrt(epsilon * (1.0 - epsilon) / static_cast<double>(n_samples));
    const double target = std::min(1.0, 1.0 - epsilon + se);
    auto idx = static_cast<std::size_t>(
        std::ceil(target * static_cast<double>(n_samples)) - 1.0);
    idx = std::min(idx, sup4.size() - 1);
    return static_cast<double>(sup4[idx]) / (4.0 * std::sqrt(static_cast<double>(n)));
}

namespace {

struct WindowOutcome {
    bool accepted = false;
    bool g = false, h = false;
    double m_final = 0.0;
    double m_stopped = 0.0;
    double qv_stopped = 0.0;
    std::vector<double> m_at_checkpoints;
};

// Simulates an SRW prefix of length n followed by an SRW window of length n
// for each trial id, recording good events and martingale checkpoints.
std::vector<WindowOutcome> run_srw_windows(const ContiguityConfig& cfg, double a_eps,
                                           std::span<const std::int64_t> checkpoints,
                                           std::int64_t trials, std::uint64_t seed,
                                           int workers) {
    const std::int64_t n = cfg.n;
    const double accept4 = 4.0 * cfg.A * std::sqrt(static_cast<double>(n));
    const double threshold4 = 4.0 * a_eps * std::sqrt(static_cast<double>(n));
    const double h_bound = (cfg.A + a_eps) / std::sqrt(cfg.epsilon);

    std::vector<WindowOutcome> outcomes(static_cast<std::size_t>(trials));
    parallel_for_chunks(trials, workers, 16, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(seed, static_cast<std::uint64_t>(w));
            auto& out = outcomes[static_cast<std::size_t>(w)];
            // Prefix: reject unless every |4 D_n(e_i)| <= 4 A sqrt(n).
            std::int64_t prefix[4] = {0, 0, 0, 0};
            for (std::int64_t k = 0; k < n; ++k) ++prefix[rng.direction4()];
            std::int64_t snap_c4[4];
            bool ok = true;
            for (int i = 0; i < 4; ++i) {
                snap_c4[i] = 4 * prefix[i] - n;
                const auto a = static_cast<double>(snap_c4[i] < 0 ? -snap_c4[i] : snap_c4[i]);
                if (a > accept4) ok = false;
            }
            if (!ok) continue;
            out.accepted = true;
            WindowTracker tracker(n);
            out.m_at_checkpoints.reserve(checkpoints.size());
            std::size_t next_cp = 0;
            for (std::int64_t k = 1; k <= n; ++k) {
                tracker.apply(static_cast<Direction>(rng.direction4()), snap_c4, n, threshold4);
                if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
                    out.m_at_checkpoints.push_back(tracker.m);
                    ++next_cp;
                }
            }
            out.m_final = tracker.m;
            out.m_stopped = tracker.stopped_m(tracker.m);
            out.qv_stopped = tracker.qv_stopped;
            out.g = tracker.sup_ok();
            out.h = std::abs(out.g ? out.m_final : 0.0) < h_bound;
        }
    });
    return outcomes;
}

}  // namespace

GoodEventReport estimate_good_events(const ContiguityConfig& cfg, double alpha,
                                     std::int64_t n_samples, std::uint64_t seed, int workers) {
    cfg.validate();
    ContiguityConfig local = cfg;
    if (local.A_eps <= 0.0)
        local.A_eps = calibrate_a_eps(cfg.n, cfg.epsilon, std::max<std::int64_t>(2000, n_samples / 8),
                                      derive_seed(seed, 1), workers);

    const auto outcomes = run_srw_windows(local, local.A_eps, {}, n_samples, seed, workers);
    std::int64_t accepted = 0, ng = 0, nh = 0, ne = 0;
    for (const auto& o : outcomes) {
        if (!o.accepted) continue;
        ++accepted;
        ng += o.g ? 1 : 0;
        nh += o.h ? 1 : 0;
        ne += (o.g && o.h) ? 1 : 0;
    }

    GoodEventReport rep;
    rep.trials = n_samples;
    rep.accepted = accepted;
    rep.a_eps = local.A_eps;
    rep.c_lower = contiguity_constant(local, alpha);
    const auto frac = [accepted](std::int64_t c) {
        return accepted > 0 ? static_cast<double>(c) / static_cast<double>(accepted) : 0.0;
    };
    const auto se = [accepted](double p) {
        return accepted > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(accepted)) : 0.0;
    };
    rep.p_g = frac(ng);
    rep.p_g_stderr = se(rep.p_g);
    rep.p_h = frac(nh);
    rep.p_h_stderr = se(rep.p_h);
    rep.p_e = frac(ne);
    rep.p_e_stderr = se(rep.p_e);
    return rep;
}

MartingaleCheckReport martingale_window_check(const ContiguityConfig& cfg,
                                              std::int64_t n_windows, std::uint64_t seed,
                                              int workers) {
    cfg.validate();
    ContiguityConfig local = cfg;
    if (local.A_eps <= 0.0)
        local.A_eps = calibrate_a_eps(cfg.n, cfg.epsilon,
                                      std::max<std::int64_t>(2000, n_windows / 8),
                                      derive_seed(seed, 1), workers);

    std::vector<std::int64_t> checkpoints;
    for (int i = 1; i <= 8; ++i) checkpoints.push_back(cfg.n * i / 8);
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    const auto outcomes = run_srw_windows(local, local.A_eps, checkpoints, n_windows, seed, workers);

    MartingaleCheckReport rep;
    rep.checkpoints = checkpoints;
    rep.a_eps = local.A_eps;
    rep.bound = (cfg.A + local.A_eps) * (cfg.A + local.A_eps);
    rep.trials = n_windows;

    std::vector<RunningMoments> m_cp(checkpoints.size());
    RunningMoments m2_stopped, qv_stopped;
    for (const auto& o : outcomes) {
        if (!o.accepted) continue;
        for (std::size_t c = 0; c < checkpoints.size(); ++c) m_cp[c].add(o.m_at_checkpoints[c]);
        m2_stopped.add(o.m_stopped * o.m_stopped);
        qv_stopped.add(o.qv_stopped);
    }
    rep.windows = m2_stopped.count();
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        rep.m_mean.push_back(m_cp[c].mean());
        rep.m_stderr.push_back(m_cp[c].std_error());
        if (std::abs(m_cp[c].mean()) > 4.0 * m_cp[c].std_error()) rep.mean_within_4se = false;
    }
    rep.stopped_m2_mean = m2_stopped.mean();
    rep.stopped_m2_stderr = m2_stopped.std_error();
    rep.stopped_qv_mean = qv_stopped.mean();
    rep.stopped_qv_stderr = qv_stopped.std_error();
    rep.stopped_m2_ok = rep.stopped_m2_mean <= rep.bound;
    return rep;
}

WindowStatistic window_returns_to_start_statistic() {
    return {"returns_to_start", [](std::span<const Direction> steps) {
                std::int64_t x = 0, y = 0;
                for (Direction d : steps) {
                    x += step_dx(d);
                    y += step_dy(d);
                    if (x == 0 && y == 0) return 1.0;
                }
                return 0.0;
            }};
}

WindowStatistic window_ends_near_start_statistic(double radius_over_sqrt_n, std::int64_t n) {
    const double r2 = radius_over_sqrt_n * radius_over_sqrt_n * static_cast<double>(n);
    return {"ends_near_start", [r2](std::span<const Direction> steps) {
                std::int64_t x = 0, y = 0;
                for (Direction d : steps) {
                    x += step_dx(d);
                    y += step_dy(d);
                }
                const double d2 = static_cast<double>(x) * static_cast<double>(x) +
                                  static_cast<double>(y) * static_cast<double>(y);
                return d2 <= r2 ? 1.0 : 0.0;
            }};
}

WindowStatistic constant_one_statistic() {
    return {"one", [](std::span<const Direction>) { return 1.0; }};
}

ContiguityBoundReport verify_contiguity_bound(const ContiguityConfig& cfg, double alpha,
                                              const WindowStatistic& statistic,
                                              std::int64_t prefix_trials,
                                              std::int64_t continuations_per_prefix,
                                              std::int64_t srw_windows_per_prefix,
                                              std::uint64_t seed, int workers) {
    cfg.validate();
    require_alpha(alpha);
    ContiguityConfig local = cfg;
    if (local.A_eps <= 0.0)
        local.A_eps = calibrate_a_eps(cfg.n, cfg.epsilon, 4000,
                                      derive_seed(seed, 1), workers);

    const std::int64_t n = cfg.n;
    const double accept4 = 4.0 * cfg.A * std::sqrt(static_cast<double>(n));
    const double threshold4 = 4.0 * local.A_eps * std::sqrt(static_cast<double>(n));
    const double h_bound = (cfg.A + local.A_eps) / std::sqrt(cfg.epsilon);

    // Stage 1: reinforced prefixes, rejection on the count ball.
    struct Prefix {
        std::int64_t c4[4];
        std::array<std::int64_t, 4> raw;
    };
    std::vector<char> keep(static_cast<std::size_t>(prefix_trials), 0);
    std::vector<Prefix> prefixes(static_cast<std::size_t>(prefix_trials));
    parallel_for_chunks(prefix_trials, workers, 16, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t w = begin; w < end; ++w) {
            Xoshiro256pp rng = substream(derive_seed(seed, 2), static_cast<std::uint64_t>(w));
            CountingWalker walker(alpha);
            for (std::int64_t k = 0; k < n; ++k) walker.step(rng);
            bool ok = true;
            auto& pre = prefixes[static_cast<std::size_t>(w)];
            for (int i = 0; i < 4; ++i) {
                pre.c4[i] = walker.centered4(i);
                pre.raw[i] = walker.raw(i);
                const auto a = static_cast<double>(pre.c4[i] < 0 ? -pre.c4[i] : pre.c4[i]);
                if (a > accept4) ok = false;
            }
            keep[static_cast<std::size_t>(w)] = ok ? 1 : 0;
        }
    });

    std::vector<Prefix> accepted;
    for (std::int64_t w = 0; w < prefix_trials; ++w)
        if (keep[static_cast<std::size_t>(w)]) accepted.push_back(prefixes[static_cast<std::size_t>(w)]);
    if (static_cast<std::int64_t>(accepted.size()) < 100)
        throw InsufficientConditioningSamples(
            "only " + std::to_string(accepted.size()) + " of " + std::to_string(prefix_trials) +
            " prefixes passed the count bound");

    // Stage 2: per-prefix window means on both measures.
    const auto n_acc = static_cast<std::int64_t>(accepted.size());
    std::vector<double> lhs_means(static_cast<std::size_t>(n_acc));
    std::vector<double> rhs_means(static_cast<std::size_t>(n_acc));
    parallel_for_chunks(n_acc, workers, 1, [&](std::int64_t begin, std::int64_t end) {
        std::vector<Direction> wsteps(static_cast<std::size_t>(n));
        for (std::int64_t p = begin; p < end; ++p) {
            const auto& pre = accepted[static_cast<std::size_t>(p)];
            const DirectionCounts snap(pre.raw, n);
            double lhs_sum = 0.0;
            {
                Xoshiro256pp rng = substream(derive_seed(seed, 3), static_cast<std::uint64_t>(p));
                for (std::int64_t r = 0; r < continuations_per_prefix; ++r) {
                    CountingWalker walker = CountingWalker::from_snapshot(alpha, snap, {});
                    WindowTracker tracker(n);
                    for (std::int64_t k = 0; k < n; ++k) {
                        const Direction d = walker.step(rng);
                        wsteps[static_cast<std::size_t>(k)] = d;
                        tracker.apply(d, pre.c4, n, threshold4);
                    }
                    const bool g = tracker.sup_ok();
                    const bool h = std::abs(g ? tracker.m : 0.0) < h_bound;
                    if (g && h) lhs_sum += statistic.eval(wsteps);
                }
            }
            double rhs_sum = 0.0;
            {
                Xoshiro256pp rng = substream(derive_seed(seed, 4), static_cast<std::uint64_t>(p));
                for (std::int64_t r = 0; r < srw_windows_per_prefix; ++r) {
                    WindowTracker tracker(n);
                    for (std::int64_t k = 0; k < n; ++k) {
                        const auto d = static_cast<Direction>(rng.direction4());
                        wsteps[static_cast<std::size_t>(k)] = d;
                        tracker.apply(d, pre.c4, n, threshold4);
                    }
                    const bool g = tracker.sup_ok();
                    const bool h = std::abs(g ? tracker.m : 0.0) < h_bound;
                    if (g && h) rhs_sum += statistic.eval(wsteps);
                }
            }
            lhs_means[static_cast<std::size_t>(p)] = lhs_sum / static_cast<double>(continuations_per_prefix);
            rhs_means[static_cast<std::size_t>(p)] = rhs_sum / static_cast<double>(srw_windows_per_prefix);
        }
    });

    RunningMoments lhs, rhs;
    for (double v : lhs_means) lhs.add(v);
    for (double v : rhs_means) rhs.add(v);

    ContiguityBoundReport rep;
    rep.lhs = lhs.mean();
    rep.lhs_stderr = lhs.std_error();
    rep.rhs_raw = rhs.mean();
    rep.rhs_raw_stderr = rhs.std_error();
    rep.c_lower = contiguity_constant(local, alpha);
    rep.a_eps = local.A_eps;
    rep.prefix_trials = prefix_trials;
    rep.prefixes_used = n_acc;
    rep.continuations_per_prefix = continuations_per_prefix;
    rep.srw_windows_per_prefix = srw_windows_per_prefix;
    const double combined =
        std::sqrt(rep.lhs_stderr * rep.lhs_stderr +
                  rep.c_lower * rep.c_lower * rep.rhs_raw_stderr * rep.rhs_raw_stderr);
    rep.margin = rep.lhs - (rep.c_lower * rep.rhs_raw - 4.0 * combined);
    rep.holds = rep.margin >= 0.0;
    return rep;
}

}  // namespace erwlab
