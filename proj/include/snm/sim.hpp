// sim.hpp - Monte Carlo sweep harness: outage, BLER, and throughput vs
// P_t/N_0 with reproducible per-trial random streams.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "snm/analytics.hpp"
#include "snm/channel.hpp"
#include "snm/codebook.hpp"
#include "snm/config.hpp"
#include "snm/detector.hpp"
#include "snm/rng.hpp"

namespace snm {

enum class Metric { outage, bler, throughput };

struct ExperimentSpec {
    SystemConfig config;
    std::vector<double> snr_db_grid;
    std::int64_t trials_per_point = 100000;
    std::uint64_t master_seed = 1;
    Scheme scheme = Scheme::enhanced;
    Metric metric = Metric::bler;
    std::optional<MultiUserScenario> multiuser;
    int workers = 1;
    // When > trials_per_point, each point keeps doubling its trial count
    // (up to the cap) until the CI half-width drops below
    // adaptive_rel_halfwidth * estimate.
    std::int64_t adaptive_max_trials = 0;
    double adaptive_rel_halfwidth = 0.1;

    void validate() const {
        config.validate();
        if (trials_per_point < 1) throw std::invalid_argument("ExperimentSpec: trials_per_point >= 1");
        if (snr_db_grid.empty()) throw std::invalid_argument("ExperimentSpec: empty SNR grid");
        for (std::size_t i = 1; i < snr_db_grid.size(); ++i) {
            if (!(snr_db_grid[i] > snr_db_grid[i - 1])) {
                throw std::invalid_argument("ExperimentSpec: SNR grid must be strictly increasing");
            }
        }
        if (scheme == Scheme::halved && config.n_subcarriers < 4) {
            throw std::invalid_argument("ExperimentSpec: halved scheme requires N >= 4");
        }
        if (workers < 1) throw std::invalid_argument("ExperimentSpec: workers >= 1");
        if (multiuser) multiuser->validate();
    }
};

struct SweepPoint {
    double snr_db = 0.0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::int64_t trials = 0;
    std::int64_t events = 0;  // outage/error count (proportion metrics)
};

struct SweepResult {
    ExperimentSpec spec;
    std::vector<SweepPoint> points;
    double wall_seconds = 0.0;
};

// Wilson score interval for a binomial proportion, 95% by default.
inline std::pair<double, double> wilson_interval(std::int64_t events, std::int64_t trials,
                                                 double z = 1.959963984540054) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(events) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

// Order-independent per-point sufficient statistics; integer-valued so the
// reduction is bit-identical regardless of worker count.
struct PointAccum {
    std::int64_t events = 0;        // outage or block-error count
    std::uint64_t bits_sum = 0;     // correctly decoded bits (throughput)
    std::uint64_t bits_sq_sum = 0;  // their squares, for the variance

    void merge(const PointAccum& o) {
        events += o.events;
        bits_sum += o.bits_sum;
        bits_sq_sum += o.bits_sq_sum;
    }
};

inline int effective_subcarriers(const ExperimentSpec& spec) {
    return spec.scheme == Scheme::halved ? spec.config.n_subcarriers / 2
                                         : spec.config.n_subcarriers;
}

inline bool outage_trial(RngStream& rng, const SystemConfig& cfg, Scheme scheme, int n_eff,
                         ChannelRealization& chan, std::vector<double>& sorted_gains) {
    sample_channel_into(rng, cfg.n_subcarriers, cfg.avg_channel_gain, chan);
    const int t = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n_eff)));
    const double threshold =
        t * cfg.noise_power * cfg.outage_threshold / cfg.transmit_power;
    double worst;
    if (scheme == Scheme::original) {
        worst = chan.gains[0];
        for (int i = 1; i < t; ++i) worst = std::min(worst, chan.gains[static_cast<std::size_t>(i)]);
    } else {
        // worst active = (N-t+1)th smallest gain
        sorted_gains = chan.gains;
        std::sort(sorted_gains.begin(), sorted_gains.end());
        worst = sorted_gains[static_cast<std::size_t>(cfg.n_subcarriers - t)];
    }
    return worst < threshold;
}

struct LinkTrialState {
    ChannelRealization chan;
    ReceivedBlock rx;
    std::optional<Codebook> codebook;
};

// Full modulate-transmit-detect chain; returns (correct, bits carried).
inline std::pair<bool, int> link_trial(RngStream& rng, const SystemConfig& cfg, Scheme scheme,
                                       const std::optional<MultiUserScenario>& mu,
                                       LinkTrialState& st) {
    if (!st.codebook) {
        st.codebook.emplace(std::vector<double>(static_cast<std::size_t>(cfg.n_subcarriers), 1.0),
                            cfg, scheme);
    }
    Codebook& cb = *st.codebook;
    sample_channel_into(rng, cfg.n_subcarriers, cfg.avg_channel_gain, st.chan);
    cb.rebuild(st.chan.gains);
    const int n_eff = cb.effective_subcarriers();
    const int t = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n_eff)));
    std::uint64_t payload_space = 1;
    for (int j = 0; j < t; ++j) payload_space *= static_cast<std::uint64_t>(cfg.psk_order);
    const std::uint64_t sv = rng.uniform_below(payload_space);
    const CodebookEntry& tx = cb.entry_for(t, sv);
    transmit_into(tx.block, st.chan, cfg, rng, st.rx);
    if (mu) st.rx = add_secondary_interference(st.rx, tx.block.sap, *mu, rng);
    const DetectionResult det = ml_detect(st.rx, st.chan, cb, cfg);
    return {det.index == tx.index, static_cast<int>(tx.bit_length())};
}

inline void run_trials(const ExperimentSpec& spec, const SystemConfig& cfg,
                       std::uint64_t point_index, std::int64_t first, std::int64_t last,
                       PointAccum& acc) {
    ChannelRealization chan;
    std::vector<double> scratch;
    LinkTrialState link;
    for (std::int64_t i = first; i < last; ++i) {
        RngStream rng(spec.master_seed,
                      mix_streams(point_index, static_cast<std::uint64_t>(i)));
        if (spec.metric == Metric::outage) {
            if (outage_trial(rng, cfg, spec.scheme, effective_subcarriers(spec), chan, scratch)) {
                ++acc.events;
            }
        } else {
            const auto [correct, bits] = link_trial(rng, cfg, spec.scheme, spec.multiuser, link);
            if (!correct) ++acc.events;
            if (spec.metric == Metric::throughput && correct) {
                acc.bits_sum += static_cast<std::uint64_t>(bits);
                acc.bits_sq_sum += static_cast<std::uint64_t>(bits) * static_cast<std::uint64_t>(bits);
            }
        }
    }
}

inline PointAccum run_point(const ExperimentSpec& spec, const SystemConfig& cfg,
                            std::uint64_t point_index, std::int64_t trials) {
    const int workers = std::max(1, spec.workers);
    if (workers == 1 || trials < 4 * workers) {
        PointAccum acc;
        run_trials(spec, cfg, point_index, 0, trials, acc);
        return acc;
    }
    std::vector<PointAccum> partial(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::int64_t first = trials * w / workers;
        const std::int64_t last = trials * (w + 1) / workers;
        pool.emplace_back([&, w, first, last] {
            run_trials(spec, cfg, point_index, first, last, partial[static_cast<std::size_t>(w)]);
        });
    }
    for (auto& th : pool) th.join();
    PointAccum acc;
    for (const auto& p : partial) acc.merge(p);
    return acc;
}

inline SweepPoint finalize_point(const ExperimentSpec& spec, double snr_db,
                                 const PointAccum& acc, std::int64_t trials) {
    SweepPoint pt;
    pt.snr_db = snr_db;
    pt.trials = trials;
    pt.events = acc.events;
    if (spec.metric == Metric::throughput) {
        const double n = static_cast<double>(trials);
        const double mean = static_cast<double>(acc.bits_sum) / n;
        const double var =
            std::max(0.0, (static_cast<double>(acc.bits_sq_sum) - n * mean * mean) / (n - 1.0));
        const double half = 1.959963984540054 * std::sqrt(var / n);
        pt.estimate = mean;
        pt.ci_low = std::max(0.0, mean - half);
        pt.ci_high = mean + half;
    } else {
        pt.estimate = static_cast<double>(acc.events) / static_cast<double>(trials);
        std::tie(pt.ci_low, pt.ci_high) = wilson_interval(acc.events, trials);
    }
    return pt;
}

inline SweepResult run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SweepResult result;
    result.spec = spec;
    for (std::size_t p = 0; p < spec.snr_db_grid.size(); ++p) {
        const double snr_db = spec.snr_db_grid[p];
        const SystemConfig cfg = spec.config.at_snr_db(snr_db);
        std::int64_t trials = spec.trials_per_point;
        PointAccum acc = run_point(spec, cfg, static_cast<std::uint64_t>(p), trials);
        while (spec.adaptive_max_trials > trials) {
            const SweepPoint pt = finalize_point(spec, snr_db, acc, trials);
            const double half = (pt.ci_high - pt.ci_low) / 2.0;
            if (pt.estimate > 0 && half < spec.adaptive_rel_halfwidth * pt.estimate) break;
            const std::int64_t target = std::min(spec.adaptive_max_trials, trials * 2);
            // Extend deterministically: trial streams depend only on the index.
            PointAccum more;
            {
                const int workers = std::max(1, spec.workers);
                if (workers == 1 || (target - trials) < 4 * workers) {
                    run_trials(spec, cfg, static_cast<std::uint64_t>(p), trials, target, more);
                } else {
                    std::vector<PointAccum> partial(static_cast<std::size_t>(workers));
                    std::vector<std::thread> pool;
                    for (int w = 0; w < workers; ++w) {
                        const std::int64_t first = trials + (target - trials) * w / workers;
                        const std::int64_t last = trials + (target - trials) * (w + 1) / workers;
                        pool.emplace_back([&, w, first, last] {
                            run_trials(spec, cfg, static_cast<std::uint64_t>(p), first, last,
                                       partial[static_cast<std::size_t>(w)]);
                        });
                    }
                    for (auto& th : pool) th.join();
                    for (const auto& pp : partial) more.merge(pp);
                }
            }
            acc.merge(more);
            trials = target;
        }
        result.points.push_back(finalize_point(spec, snr_db, acc, trials));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace detail

inline SweepResult run_outage_sweep(const ExperimentSpec& spec) {
    if (spec.metric != Metric::outage) throw std::invalid_argument("run_outage_sweep: metric must be outage");
    return detail::run_sweep(spec);
}

inline SweepResult run_bler_sweep(const ExperimentSpec& spec) {
    if (spec.metric != Metric::bler) throw std::invalid_argument("run_bler_sweep: metric must be bler");
    return detail::run_sweep(spec);
}

inline SweepResult run_throughput_sweep(const ExperimentSpec& spec) {
    if (spec.metric != Metric::throughput) {
        throw std::invalid_argument("run_throughput_sweep: metric must be throughput");
    }
    return detail::run_sweep(spec);
}

inline SweepResult run_multiuser_bler_sweep(const ExperimentSpec& spec) {
    if (!spec.multiuser) throw std::invalid_argument("run_multiuser_bler_sweep: scenario required");
    if (spec.metric != Metric::bler) throw std::invalid_argument("run_multiuser_bler_sweep: metric must be bler");
    return detail::run_sweep(spec);
}

// Least-squares slope of -log10(estimate) against snr_db/10 over the window;
// the high-SNR diversity order when the window sits on the asymptote.
inline double estimate_diversity_order(const std::vector<double>& snr_db,
                                       const std::vector<double>& estimates, double window_lo_db,
                                       double window_hi_db) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        if (snr_db[i] < window_lo_db || snr_db[i] > window_hi_db) continue;
        if (!(estimates[i] > 0)) {
            throw std::invalid_argument("estimate_diversity_order: nonpositive estimate in window");
        }
        const double x = snr_db[i] / 10.0;
        const double y = -std::log10(estimates[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("estimate_diversity_order: need >= 2 points in window");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double estimate_diversity_order(const SweepResult& result, double window_lo_db,
                                       double window_hi_db) {
    std::vector<double> snr, est;
    snr.reserve(result.points.size());
    est.reserve(result.points.size());
    for (const auto& p : result.points) {
        snr.push_back(p.snr_db);
        est.push_back(p.estimate);
    }
    return estimate_diversity_order(snr, est, window_lo_db, window_hi_db);
}

}  // namespace snm
