// analytics.hpp - closed-form outage, BLER union bound, and rate
// comparisons, plus the special-function kernels they need.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "snm/codebook.hpp"
#include "snm/config.hpp"

namespace snm {

// Exponential-approximation constants for the Gaussian tail function:
// Q(x) ~ sum_i rho_i exp(-eta_i x^2).
inline constexpr double kQRho[2] = {1.0 / 12.0, 1.0 / 4.0};
inline constexpr double kQEta[2] = {1.0 / 2.0, 2.0 / 3.0};

struct OutagePoint {
    double snr_db = 0.0;
    double exact = 0.0;
    double asymptotic = 0.0;
};

struct BlerPoint {
    double snr_db = 0.0;
    double union_bound = 0.0;  // may exceed 1 at low SNR, reported raw
};

// Distance profile between two blocks in the coordinate system the PEP
// kernels expect: order positions (ascending gain) when the transmitted
// block leaves subcarriers idle, plain indices when it activates all of them.
struct PairDelta {
    std::vector<double> deltas;
    bool ordered = false;
};

// --- special-function kernels --------------------------------------------

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
    return r;
}

// 2F1(1, 1-t, c; z) for integer t >= 1: the series terminates after t terms.
inline double hyp2f1_terminating(int t, double c, double z) {
    if (t < 1) throw std::invalid_argument("hyp2f1_terminating: t must be >= 1");
    double sum = 0.0, term = 1.0;
    for (int m = 0; m < t; ++m) {
        sum += term;
        term *= (1.0 - t + m) * z / (c + m);
    }
    return sum;
}

// N! Gamma(N-v+1+a) / ((N-v)! Gamma(N+1+a)), evaluated as the finite product
// prod_{j=N-v+1}^{N} j/(j+a): exact, overflow-free, no log-Gamma cancellation.
inline double ordered_gain_factor(int n, int upsilon, double a) {
    if (upsilon < 1 || upsilon > n) throw std::invalid_argument("ordered_gain_factor: v out of range");
    double r = 1.0;
    for (int j = n - upsilon + 1; j <= n; ++j) r *= j / (j + a);
    return r;
}

// --- outage ---------------------------------------------------------------

// CDF of the Rayleigh channel power gain: 1 - exp(-nu/mu).
inline double rayleigh_cdf(double nu, double mu) {
    if (nu < 0) throw std::invalid_argument("rayleigh_cdf: nu must be non-negative");
    if (!(mu > 0)) throw std::invalid_argument("rayleigh_cdf: mu must be positive");
    return -std::expm1(-nu / mu);
}

// Conditional outage probability given T(k)=t active subcarriers, with the
// CSI-aware placement. For t < N the worst active subcarrier is the
// (N-t+1)th order statistic; for t = N all subcarriers are homogeneous.
inline double outage_given_t(int t, const SystemConfig& config) {
    const int n = config.n_subcarriers;
    if (t < 1 || t > n) throw std::invalid_argument("outage_given_t: t out of range");
    const double f = rayleigh_cdf(t * config.noise_power * config.outage_threshold /
                                      config.transmit_power,
                                  config.avg_channel_gain);
    if (t == n) {
        return -std::expm1(n * std::log1p(-f));
    }
    double sum = 0.0;
    for (int j = n - t + 1; j <= n; ++j) {
        sum += binomial(n, j) * std::pow(f, j) * std::pow(1.0 - f, n - j);
    }
    return sum;
}

inline double average_outage(const SystemConfig& config) {
    double sum = 0.0;
    for (int t = 1; t <= config.n_subcarriers; ++t) sum += outage_given_t(t, config);
    return sum / config.n_subcarriers;
}

// High-SNR expansion of outage_given_t; the hypergeometric factor terminates
// because its second parameter 1-t is a non-positive integer.
inline double asymptotic_outage_given_t(int t, const SystemConfig& config) {
    const int n = config.n_subcarriers;
    if (t < 1 || t > n) throw std::invalid_argument("asymptotic_outage_given_t: t out of range");
    const double eps = config.noise_power * config.outage_threshold /
                       (config.transmit_power * config.avg_channel_gain);
    if (t == n) {
        return static_cast<double>(n) * n * eps;
    }
    return std::pow(t * eps, n - t + 1) * binomial(n, n - t + 1) *
           hyp2f1_terminating(t, n - t + 2, -t * eps);
}

inline double asymptotic_average_outage(const SystemConfig& config) {
    double sum = 0.0;
    for (int t = 1; t <= config.n_subcarriers; ++t) sum += asymptotic_outage_given_t(t, config);
    return sum / config.n_subcarriers;
}

// Fixed-placement baseline (subcarriers 1..t active): the active gains are
// plain i.i.d. draws, no order statistics involved.
inline double outage_given_t_fixed(int t, const SystemConfig& config) {
    const int n = config.n_subcarriers;
    if (t < 1 || t > n) throw std::invalid_argument("outage_given_t_fixed: t out of range");
    const double f = rayleigh_cdf(t * config.noise_power * config.outage_threshold /
                                      config.transmit_power,
                                  config.avg_channel_gain);
    return -std::expm1(t * std::log1p(-f));
}

inline double average_outage_fixed(const SystemConfig& config) {
    double sum = 0.0;
    for (int t = 1; t <= config.n_subcarriers; ++t) sum += outage_given_t_fixed(t, config);
    return sum / config.n_subcarriers;
}

// --- pairwise error probability and BLER union bound ----------------------

// Delta at each coordinate is |x/sqrt(T(tx)) - xhat/sqrt(T(rx))|^2.
//
// When T(tx) < N both blocks' active symbols occupy the top order positions
// (assignment puts actives on the largest gains); position 0 is the smallest
// gain, position N-1 the largest. When T(tx) = N plain index coordinates are
// used and the candidate sits wherever its SAP places it.
inline PairDelta pair_deltas(const CodebookEntry& tx, const CodebookEntry& rx, int n) {
    PairDelta d;
    d.deltas.assign(static_cast<std::size_t>(n), 0.0);
    const int t_tx = tx.active_count();
    const int t_rx = rx.active_count();
    const double inv_tx = 1.0 / std::sqrt(static_cast<double>(t_tx));
    const double inv_rx = 1.0 / std::sqrt(static_cast<double>(t_rx));
    if (t_tx < n) {
        d.ordered = true;
        std::vector<std::complex<double>> a(static_cast<std::size_t>(n), {0.0, 0.0});
        std::vector<std::complex<double>> b(static_cast<std::size_t>(n), {0.0, 0.0});
        for (int j = 0; j < t_tx; ++j) {
            a[static_cast<std::size_t>(n - t_tx + j)] =
                inv_tx * tx.active_symbols[static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < t_rx; ++j) {
            b[static_cast<std::size_t>(n - t_rx + j)] =
                inv_rx * rx.active_symbols[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < n; ++i) {
            d.deltas[static_cast<std::size_t>(i)] =
                std::norm(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
        }
    } else {
        d.ordered = false;
        for (int i = 0; i < n; ++i) {
            d.deltas[static_cast<std::size_t>(i)] =
                std::norm(inv_tx * tx.block.symbols[static_cast<std::size_t>(i)] -
                          inv_rx * rx.block.symbols[static_cast<std::size_t>(i)]);
        }
    }
    return d;
}

// The conditional PEP is Q(sqrt(||d||^2 / (2 N_0))) for CN(0, N_0) noise;
// the 1/2 carries into every eta_i exponent below.
inline double pep_snr_scale(const SystemConfig& config) {
    return 0.5 * config.transmit_power * config.avg_channel_gain / config.noise_power;
}

// Average PEP when the transmitted block uses subcarrier assignment
// (T(tx) < N): expectation over the joint order statistics of the gains.
inline double pep_ordered(const PairDelta& delta, const SystemConfig& config) {
    const int n = static_cast<int>(delta.deltas.size());
    const double scale = pep_snr_scale(config);
    double pep = 0.0;
    for (int i = 0; i < 2; ++i) {
        double prod = 1.0;
        for (int upsilon = 1; upsilon <= n; ++upsilon) {
            const double a = kQEta[i] * scale * delta.deltas[static_cast<std::size_t>(upsilon - 1)];
            if (a != 0.0) prod *= ordered_gain_factor(n, upsilon, a);
        }
        pep += kQRho[i] * prod;
    }
    return pep;
}

// Average PEP for a fully-active transmitted block (T(tx) = N): the gains are
// unordered i.i.d. exponentials.
inline double pep_full(const PairDelta& delta, const SystemConfig& config) {
    const double scale = pep_snr_scale(config);
    double pep = 0.0;
    for (int i = 0; i < 2; ++i) {
        double prod = 1.0;
        for (double d : delta.deltas) prod /= 1.0 + kQEta[i] * scale * d;
        pep += kQRho[i] * prod;
    }
    return pep;
}

inline double pep_pair(const CodebookEntry& tx, const CodebookEntry& rx,
                       const SystemConfig& config) {
    const PairDelta d = pair_deltas(tx, rx, config.n_subcarriers);
    return d.ordered ? pep_ordered(d, config) : pep_full(d, config);
}

// Union-bound average BLER over the whole codebook grammar, weighted by the
// block-usage probability 1/(N M^T). Values above 1 are reported raw.
inline BlerPoint average_bler(const SystemConfig& config) {
    config.validate();
    const int n = config.n_subcarriers;
    // PEP depends only on T values and symbols, not on the CSI placement;
    // a fixed-placement codebook enumerates the grammar.
    const Codebook grammar(std::vector<double>(static_cast<std::size_t>(n), 1.0), config,
                           Scheme::original);
    double bler = 0.0;
    for (const auto& tx : grammar.entries()) {
        const double weight =
            1.0 / (n * std::pow(static_cast<double>(config.psk_order), tx.active_count()));
        double conditional = 0.0;
        for (const auto& rx : grammar.entries()) {
            if (rx.index == tx.index) continue;
            conditional += pep_pair(tx, rx, config);
        }
        bler += weight * conditional;
    }
    return {config.snr_db(), bler};
}

// --- transmission-rate comparisons ----------------------------------------

// OFDM-IM rate with T fixed active subcarriers: floor(log2 C(N,T)) + T log2 M.
inline double rate_im(int n, int t, int m) {
    if (t < 1 || t >= n) throw std::invalid_argument("rate_im: need 1 <= t < n");
    const double c = binomial(n, t);
    return std::floor(std::log2(c)) + t * std::log2(static_cast<double>(m));
}

inline double rate_ofdm(int n, int m) { return n * std::log2(static_cast<double>(m)); }

// Smallest power-of-two M >= 2 for which the bound-based comparison puts the
// average rate at or above the OFDM-IM rate; empty when T > (N+1)/2.
inline std::optional<std::uint64_t> min_psk_vs_im(int n, int t) {
    if (!is_power_of_two(static_cast<std::uint64_t>(n))) {
        throw std::invalid_argument("min_psk_vs_im: n must be a power of two");
    }
    if (t < 1 || t >= n) throw std::invalid_argument("min_psk_vs_im: need 1 <= t < n");
    if (2 * t > n + 1) return std::nullopt;
    const double exponent = 1.0 / (t - 0.5 * (n + 1));
    const double bound = std::pow(static_cast<double>(n) / binomial(n, t), exponent);
    std::uint64_t m = 2;
    while (static_cast<double>(m) < bound * (1.0 - 1e-12)) m *= 2;
    return m;
}

// Exact floored comparison: smallest power-of-two M >= 2 with
// average_rate(n, M) >= rate_im(n, t, M). Differs from the bound-based table
// where the bound is loose (e.g. n=8, t=4 admits M=64 with equality).
inline std::optional<std::uint64_t> min_psk_vs_im_exact(int n, int t) {
    if (!is_power_of_two(static_cast<std::uint64_t>(n))) {
        throw std::invalid_argument("min_psk_vs_im_exact: n must be a power of two");
    }
    if (t < 1 || t >= n) throw std::invalid_argument("min_psk_vs_im_exact: need 1 <= t < n");
    // rate difference is monotone in log2(M) with slope (n+1)/2 - t
    for (std::uint64_t m = 2; m <= (1ULL << 30); m *= 2) {
        if (average_rate(n, static_cast<int>(std::min<std::uint64_t>(m, 1u << 30))) >=
            rate_im(n, t, static_cast<int>(m)) - 1e-9) {
            return m;
        }
        if (2 * t > n + 1) return std::nullopt;  // slope negative, no larger M helps
    }
    return std::nullopt;
}

// All powers of two M with 2 <= M <= N^{2/(N-1)}: where the average rate
// meets or beats plain OFDM.
inline std::vector<std::uint64_t> psk_set_vs_ofdm(int n) {
    if (!is_power_of_two(static_cast<std::uint64_t>(n))) {
        throw std::invalid_argument("psk_set_vs_ofdm: n must be a power of two");
    }
    const double bound = std::pow(static_cast<double>(n), 2.0 / (n - 1));
    std::vector<std::uint64_t> out;
    for (std::uint64_t m = 2; static_cast<double>(m) <= bound * (1.0 + 1e-12); m *= 2) {
        out.push_back(m);
    }
    return out;
}

}  // namespace snm
