#include "doctest.h"

#include <cmath>
#include <vector>

#include "snm/analytics.hpp"
#include "snm/rng.hpp"

using namespace snm;

namespace {

SystemConfig make_config(int n, int m, double pt_over_n0) {
    SystemConfig c;
    c.n_subcarriers = n;
    c.psk_order = m;
    c.transmit_power = pt_over_n0;
    c.noise_power = 1.0;
    return c;
}

// Raw Gauss series for 2F1(1, 1-t, c; z): Pochhammer symbols accumulated
// separately from the tested recurrence.
double hyp2f1_series(int t, double c, double z) {
    double sum = 0.0;
    double poch_one = 1.0, poch_b = 1.0, poch_c = 1.0, zm = 1.0, fact = 1.0;
    for (int m = 0;; ++m) {
        sum += poch_one * poch_b / (poch_c * fact) * zm;
        if (m >= t - 1) break;  // (1-t)_m vanishes beyond m = t-1
        poch_one *= 1.0 + m;
        poch_b *= (1.0 - t) + m;
        poch_c *= c + m;
        zm *= z;
        fact *= m + 1.0;
    }
    return sum;
}

double gamma_ratio_reference(int n, int upsilon, double a) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(n - upsilon + 1.0) +
                    std::lgamma(n - upsilon + 1.0 + a) - std::lgamma(n + 1.0 + a));
}

}  // namespace

TEST_CASE("binomial coefficients") {
    CHECK(binomial(4, 2) == doctest::Approx(6.0));
    CHECK(binomial(8, 4) == doctest::Approx(70.0));
    CHECK(binomial(8, 0) == doctest::Approx(1.0));
    CHECK(binomial(8, 8) == doctest::Approx(1.0));
    CHECK(binomial(4, 5) == 0.0);
    CHECK(binomial(4, -1) == 0.0);
}

TEST_CASE("terminating 2F1 matches the raw Gauss series") {
    for (int t : {1, 2, 3, 7, 12}) {
        for (double c : {2.0, 3.5, 9.0}) {
            for (double z : {-0.9, -1e-3, 0.2, 0.8}) {
                const double got = hyp2f1_terminating(t, c, z);
                const double want = hyp2f1_series(t, c, z);
                CHECK(got == doctest::Approx(want).epsilon(1e-10));
            }
        }
    }
    CHECK(hyp2f1_terminating(1, 5.0, 0.7) == doctest::Approx(1.0));  // single term
    CHECK_THROWS_AS(hyp2f1_terminating(0, 2.0, 0.5), std::invalid_argument);
}

TEST_CASE("ordered gain factor matches the log-Gamma ratio") {
    for (int n : {2, 4, 8, 16}) {
        for (int upsilon = 1; upsilon <= n; ++upsilon) {
            for (double a : {0.0, 0.5, 1.0, 17.5, 1000.0}) {
                const double got = ordered_gain_factor(n, upsilon, a);
                const double want = gamma_ratio_reference(n, upsilon, a);
                CHECK(got == doctest::Approx(want).epsilon(1e-8));
            }
        }
    }
    CHECK(ordered_gain_factor(4, 4, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ordered_gain_factor(4, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ordered_gain_factor(4, 5, 1.0), std::invalid_argument);
}

TEST_CASE("Rayleigh power-gain CDF") {
    CHECK(rayleigh_cdf(0.0, 1.0) == 0.0);
    CHECK(rayleigh_cdf(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(rayleigh_cdf(2.0, 4.0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
    CHECK(rayleigh_cdf(0.5, 1.0) < rayleigh_cdf(1.5, 1.0));
    CHECK_THROWS_AS(rayleigh_cdf(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rayleigh_cdf(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("fully active outage at P_t/N_0 = 40 dB") {
    const SystemConfig cfg = make_config(4, 2, 1e4);
    // 1 - (1 - F(4e-4))^4 with F(nu) = 1 - exp(-nu)
    const double want = -std::expm1(4.0 * std::log1p(std::expm1(-4e-4) /* = -(F) */));
    CHECK(outage_given_t(4, cfg) == doctest::Approx(want).epsilon(1e-12));
    CHECK(outage_given_t(4, cfg) == doctest::Approx(1.5994e-3).epsilon(1e-3));
    CHECK(asymptotic_outage_given_t(4, cfg) == doctest::Approx(16.0 / 1e4).epsilon(1e-12));
}

TEST_CASE("single active subcarrier reduces to F^N") {
    for (int n : {4, 8}) {
        const SystemConfig cfg = make_config(n, 2, 100.0);
        const double f = rayleigh_cdf(cfg.noise_power * cfg.outage_threshold / cfg.transmit_power,
                                      cfg.avg_channel_gain);
        CHECK(outage_given_t(1, cfg) == doctest::Approx(std::pow(f, n)).epsilon(1e-12));
        CHECK(asymptotic_outage_given_t(1, cfg) ==
              doctest::Approx(std::pow(1.0 / 100.0, n)).epsilon(1e-12));
    }
}

TEST_CASE("order-statistic outage matches a direct Monte Carlo estimate") {
    const SystemConfig cfg = make_config(4, 2, 100.0);
    RngStream rng(11, 0);
    const int draws = 200000;
    std::vector<double> g(4);
    for (int t : {2, 3}) {
        const double cut = t * cfg.noise_power * cfg.outage_threshold / cfg.transmit_power;
        int hits = 0;
        for (int i = 0; i < draws; ++i) {
            for (auto& v : g) v = rng.exponential(cfg.avg_channel_gain);
            std::sort(g.begin(), g.end());
            if (g[static_cast<std::size_t>(4 - t)] < cut) ++hits;
        }
        const double p = outage_given_t(t, cfg);
        const double se = std::sqrt(p * (1.0 - p) / draws);
        CHECK(std::abs(static_cast<double>(hits) / draws - p) < 3.0 * se + 1e-12);
    }
}

TEST_CASE("asymptotic outage converges to the exact expression") {
    for (int n : {4, 8}) {
        const SystemConfig cfg = make_config(n, 2, 1e6);  // 60 dB
        for (int t = 1; t <= n; ++t) {
            const double exact = outage_given_t(t, cfg);
            const double asym = asymptotic_outage_given_t(t, cfg);
            CHECK(asym / exact == doctest::Approx(1.0).epsilon(0.02));
        }
        CHECK(asymptotic_average_outage(cfg) / average_outage(cfg) ==
              doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("average outage is a proper probability and decreases with power") {
    const SystemConfig lo = make_config(4, 2, 10.0);
    const SystemConfig hi = make_config(4, 2, 1000.0);
    CHECK(average_outage(lo) > 0.0);
    CHECK(average_outage(lo) < 1.0);
    CHECK(average_outage(hi) < average_outage(lo));
}

TEST_CASE("CSI-aware placement never loses to the fixed placement") {
    for (double pt : {10.0, 100.0, 1e4}) {
        const SystemConfig cfg = make_config(4, 2, pt);
        for (int t = 1; t <= 4; ++t) {
            CHECK(outage_given_t(t, cfg) <= outage_given_t_fixed(t, cfg) + 1e-15);
        }
        CHECK(average_outage(cfg) <= average_outage_fixed(cfg) + 1e-15);
    }
    // t = N: identical, no placement freedom
    const SystemConfig cfg = make_config(4, 2, 100.0);
    CHECK(outage_given_t(4, cfg) == doctest::Approx(outage_given_t_fixed(4, cfg)).epsilon(1e-12));
}

TEST_CASE("zero distance profile collapses both PEP kernels to 1/3") {
    const SystemConfig cfg = make_config(4, 2, 100.0);
    PairDelta zero;
    zero.deltas.assign(4, 0.0);
    zero.ordered = true;
    CHECK(pep_ordered(zero, cfg) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    zero.ordered = false;
    CHECK(pep_full(zero, cfg) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("single difference on the weakest order position") {
    const SystemConfig cfg = make_config(4, 2, 25.0);
    const double d = 0.8;
    PairDelta delta;
    delta.deltas = {d, 0.0, 0.0, 0.0};
    delta.ordered = true;
    const double s = 0.5 * cfg.transmit_power * cfg.avg_channel_gain / cfg.noise_power;
    double want = 0.0;
    for (int i = 0; i < 2; ++i) want += kQRho[i] * 4.0 / (4.0 + kQEta[i] * s * d);
    CHECK(pep_ordered(delta, cfg) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("single-position ordered PEP matches Monte Carlo over order statistics") {
    const SystemConfig cfg = make_config(4, 2, 4.0);
    const double d = 0.8;
    RngStream rng(21, 0);
    const int draws = 400000;
    std::vector<double> g(4);
    for (int pos : {0, 1, 3}) {  // order position upsilon-1
        PairDelta delta;
        delta.deltas.assign(4, 0.0);
        delta.deltas[static_cast<std::size_t>(pos)] = d;
        delta.ordered = true;
        double acc = 0.0;
        for (int i = 0; i < draws; ++i) {
            for (auto& v : g) v = rng.exponential(cfg.avg_channel_gain);
            std::sort(g.begin(), g.end());
            // squared Q argument: P_t * G * delta / (2 N_0)
            const double x2 = 0.5 * cfg.transmit_power / cfg.noise_power * d *
                              g[static_cast<std::size_t>(pos)];
            acc += kQRho[0] * std::exp(-kQEta[0] * x2) + kQRho[1] * std::exp(-kQEta[1] * x2);
        }
        CHECK(acc / draws == doctest::Approx(pep_ordered(delta, cfg)).epsilon(0.02));
    }
}

TEST_CASE("full-activation PEP matches Monte Carlo over i.i.d. gains") {
    const SystemConfig cfg = make_config(4, 2, 4.0);
    PairDelta delta;
    delta.deltas = {0.5, 0.0, 2.0, 1.0};
    delta.ordered = false;
    RngStream rng(22, 0);
    const int draws = 400000;
    double approx_acc = 0.0, exact_acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        double x2 = 0.0;
        for (double d : delta.deltas) {
            x2 += 0.5 * cfg.transmit_power / cfg.noise_power * d *
                  rng.exponential(cfg.avg_channel_gain);
        }
        approx_acc += kQRho[0] * std::exp(-kQEta[0] * x2) + kQRho[1] * std::exp(-kQEta[1] * x2);
        exact_acc += 0.5 * std::erfc(std::sqrt(x2 / 2.0));
    }
    const double closed = pep_full(delta, cfg);
    CHECK(approx_acc / draws == doctest::Approx(closed).epsilon(0.02));
    // the exponential Q-approximation itself is only good to a few percent
    CHECK(exact_acc / draws == doctest::Approx(closed).epsilon(0.15));
}

TEST_CASE("single-difference full-activation PEP tracks the exact Rayleigh average") {
    // E[Q(sqrt(P_t G d / (2 N_0)))] = (1 - sqrt(c/(1+c)))/2 with c = P_t mu d/(4 N_0)
    const double d = 1.0;
    for (double snr_db : {20.0, 30.0, 40.0}) {
        SystemConfig cfg = make_config(4, 2, std::pow(10.0, snr_db / 10.0));
        PairDelta delta;
        delta.deltas = {d, 0.0, 0.0, 0.0};
        delta.ordered = false;
        const double c = cfg.transmit_power * cfg.avg_channel_gain * d / (4.0 * cfg.noise_power);
        const double exact = 0.5 * (1.0 - std::sqrt(c / (1.0 + c)));
        CHECK(pep_full(delta, cfg) == doctest::Approx(exact).epsilon(0.10));
    }
}

TEST_CASE("PEP kernels decay with SNR and with order position") {
    PairDelta low_pos, high_pos;
    low_pos.deltas = {1.0, 0.0, 0.0, 0.0};
    low_pos.ordered = true;
    high_pos.deltas = {0.0, 0.0, 0.0, 1.0};
    high_pos.ordered = true;
    const SystemConfig lo = make_config(4, 2, 10.0);
    const SystemConfig hi = make_config(4, 2, 1000.0);
    CHECK(pep_ordered(low_pos, hi) < pep_ordered(low_pos, lo));
    CHECK(pep_ordered(high_pos, lo) < pep_ordered(low_pos, lo));
    PairDelta full;
    full.deltas = {1.0, 1.0, 1.0, 1.0};
    full.ordered = false;
    CHECK(pep_full(full, hi) < pep_full(full, lo));
}

TEST_CASE("pair deltas use order coordinates below full activation") {
    const SystemConfig cfg = make_config(4, 2, 100.0);
    const Codebook cb(std::vector<double>(4, 1.0), cfg, Scheme::original);
    const auto& tx = cb.entries()[0];  // T = 1
    const auto& rx = cb.entries()[2];  // T = 2
    const PairDelta d = pair_deltas(tx, rx, 4);
    CHECK(d.ordered);
    CHECK(d.deltas.size() == 4);
    // T=1 occupies the top position, T=2 the top two; positions 0,1 differ
    CHECK(d.deltas[0] == 0.0);
    CHECK(d.deltas[2] > 0.0);
    // identical entries give an all-zero profile
    const PairDelta same = pair_deltas(tx, tx, 4);
    for (double v : same.deltas) CHECK(v == 0.0);
}

TEST_CASE("pair deltas use index coordinates at full activation") {
    const SystemConfig cfg = make_config(4, 2, 100.0);
    const Codebook cb(std::vector<double>(4, 1.0), cfg, Scheme::original);
    const auto& tx = *std::find_if(cb.entries().begin(), cb.entries().end(),
                                   [](const CodebookEntry& e) { return e.active_count() == 4; });
    const auto& rx = cb.entries()[0];  // T = 1
    const PairDelta d = pair_deltas(tx, rx, 4);
    CHECK_FALSE(d.ordered);
    for (double v : d.deltas) CHECK(v > 0.0);  // BPSK symbols never cancel against 0 or mismatch
}

TEST_CASE("union-bound BLER is positive and non-increasing in SNR") {
    double prev = std::numeric_limits<double>::infinity();
    for (double snr_db = 0.0; snr_db <= 40.0; snr_db += 5.0) {
        const SystemConfig cfg = make_config(4, 2, std::pow(10.0, snr_db / 10.0));
        const BlerPoint p = average_bler(cfg);
        CHECK(p.union_bound > 0.0);
        CHECK(p.union_bound <= prev + 1e-15);
        prev = p.union_bound;
    }
    // high-SNR tail is well below 1
    const SystemConfig cfg = make_config(4, 2, 1e4);
    CHECK(average_bler(cfg).union_bound < 0.1);
}

TEST_CASE("block-usage weights sum to one over the grammar") {
    const SystemConfig cfg = make_config(4, 4, 100.0);
    const Codebook grammar(std::vector<double>(4, 1.0), cfg, Scheme::original);
    double total = 0.0;
    for (const auto& e : grammar.entries()) {
        total += 1.0 / (4.0 * std::pow(4.0, e.active_count()));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transmission rates") {
    CHECK(rate_im(4, 2, 2) == doctest::Approx(4.0));   // floor(log2 6) + 2
    CHECK(rate_im(8, 4, 2) == doctest::Approx(10.0));  // floor(log2 70) + 4
    CHECK(rate_im(8, 4, 4) == doctest::Approx(14.0));
    CHECK(rate_ofdm(4, 2) == doctest::Approx(4.0));
    CHECK(rate_ofdm(8, 4) == doctest::Approx(16.0));
    CHECK(average_rate(4, 2) == doctest::Approx(4.5));
    CHECK(average_rate(8, 4) == doctest::Approx(12.0));
    CHECK_THROWS_AS(rate_im(4, 4, 2), std::invalid_argument);
}

TEST_CASE("minimum PSK order against OFDM-IM (bound-based)") {
    CHECK(min_psk_vs_im(2, 1) == 2u);
    CHECK(min_psk_vs_im(4, 1) == 2u);
    CHECK(min_psk_vs_im(4, 2) == 4u);
    CHECK_FALSE(min_psk_vs_im(4, 3).has_value());
    CHECK(min_psk_vs_im(8, 1) == 2u);
    CHECK(min_psk_vs_im(8, 2) == 2u);
    CHECK(min_psk_vs_im(8, 3) == 4u);
    CHECK(min_psk_vs_im(8, 4) == 128u);
    for (int t : {5, 6, 7}) CHECK_FALSE(min_psk_vs_im(8, t).has_value());
    CHECK_THROWS_AS(min_psk_vs_im(6, 2), std::invalid_argument);
}

TEST_CASE("minimum PSK order against OFDM-IM (exact floored rate)") {
    // the floored IM rate is weaker than its bound: equality already at M = 64
    CHECK(min_psk_vs_im_exact(8, 4) == 64u);
    // the flooring of log2 C(N,T) already closes the gap at M = 2 here
    CHECK(min_psk_vs_im_exact(4, 2) == 2u);
    CHECK(min_psk_vs_im_exact(4, 1) == 2u);
    CHECK_FALSE(min_psk_vs_im_exact(4, 3).has_value());
}

TEST_CASE("PSK orders matching or beating plain OFDM") {
    CHECK(psk_set_vs_ofdm(2) == std::vector<std::uint64_t>{2, 4});  // bound N^2 = 4
    CHECK(psk_set_vs_ofdm(4) == std::vector<std::uint64_t>{2});     // bound ~2.52
    CHECK(psk_set_vs_ofdm(8).empty());                              // bound ~1.81 < 2
    CHECK_THROWS_AS(psk_set_vs_ofdm(6), std::invalid_argument);
}
