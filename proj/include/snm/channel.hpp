// channel.hpp - i.i.d. Rayleigh subcarrier channels and AWGN transmission.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "snm/codebook.hpp"
#include "snm/config.hpp"
#include "snm/rng.hpp"

namespace snm {

// One draw of the N complex subcarrier coefficients h(n) and their power
// gains |h(n)|^2.
struct ChannelRealization {
    std::vector<std::complex<double>> coefficients;
    std::vector<double> gains;
};

struct ReceivedBlock {
    std::vector<std::complex<double>> samples;
};

// Circularly-symmetric complex Gaussian coefficients with E|h|^2 = mu
// (variance mu/2 per real dimension), independent across subcarriers.
inline void sample_channel_into(RngStream& rng, int n, double mu, ChannelRealization& out) {
    if (!(mu > 0)) throw std::invalid_argument("sample_channel: mu must be positive");
    out.coefficients.resize(static_cast<std::size_t>(n));
    out.gains.resize(static_cast<std::size_t>(n));
    const double sigma = std::sqrt(mu / 2.0);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> h{sigma * rng.normal(), sigma * rng.normal()};
        out.coefficients[static_cast<std::size_t>(i)] = h;
        out.gains[static_cast<std::size_t>(i)] = std::norm(h);
    }
}

inline ChannelRealization sample_channel(RngStream& rng, int n, double mu) {
    ChannelRealization c;
    sample_channel_into(rng, n, mu, c);
    return c;
}

// y(n) = sqrt(P_t/T) h(n) x(n) + w(n), with total noise power N_0 per
// subcarrier (N_0/2 per real dimension). The P_t/T split keeps the per-block
// transmit energy at exactly P_t.
inline void transmit_into(const OfdmBlock& block, const ChannelRealization& channel,
                          const SystemConfig& config, RngStream& rng, ReceivedBlock& out) {
    const std::size_t n = block.symbols.size();
    if (channel.coefficients.size() != n) {
        throw std::invalid_argument("transmit: block/channel dimension mismatch");
    }
    out.samples.resize(n);
    const double amp = std::sqrt(config.transmit_power / block.sap.t);
    const double noise_sigma = std::sqrt(config.noise_power / 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> s{noise_sigma * rng.normal(), noise_sigma * rng.normal()};
        if (block.sap.active[i]) {
            s += amp * channel.coefficients[i] * block.symbols[i];
        }
        out.samples[i] = s;
    }
}

inline ReceivedBlock transmit(const OfdmBlock& block, const ChannelRealization& channel,
                              const SystemConfig& config, RngStream& rng) {
    ReceivedBlock y;
    transmit_into(block, channel, config, rng, y);
    return y;
}

// Per-subcarrier received SNR: P_t |h(n)|^2 / (T N_0) on active subcarriers,
// zero elsewhere.
inline std::vector<double> subcarrier_snr(const ChannelRealization& channel, const Sap& sap,
                                          const SystemConfig& config) {
    if (channel.gains.size() != sap.active.size()) {
        throw std::invalid_argument("subcarrier_snr: dimension mismatch");
    }
    std::vector<double> snr(channel.gains.size(), 0.0);
    const double scale = config.transmit_power / (sap.t * config.noise_power);
    for (std::size_t i = 0; i < snr.size(); ++i) {
        if (sap.active[i]) snr[i] = scale * channel.gains[i];
    }
    return snr;
}

}  // namespace snm
