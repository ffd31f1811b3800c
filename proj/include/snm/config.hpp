// config.hpp - operating-point parameters shared by all modules.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace snm {

constexpr bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// log2 of an exact power of two.
constexpr int log2_exact(std::uint64_t v) {
    if (!is_power_of_two(v)) throw std::invalid_argument("log2_exact: not a power of two");
    int e = 0;
    while (v > 1) {
        v >>= 1;
        ++e;
    }
    return e;
}

// One operating point: N subcarriers, M-PSK, transmit/noise powers and the
// outage threshold, all in linear units.
struct SystemConfig {
    int n_subcarriers = 4;         // N, power of two in [2, 16]
    int psk_order = 2;             // M, power of two >= 2
    double transmit_power = 1.0;   // P_t
    double noise_power = 1.0;      // N_0
    double outage_threshold = 1.0; // xi (linear SNR)
    double avg_channel_gain = 1.0; // mu

    void validate() const {
        if (n_subcarriers < 2 || n_subcarriers > 16 || !is_power_of_two(static_cast<std::uint64_t>(n_subcarriers))) {
            throw std::invalid_argument("SystemConfig: N must be a power of two in [2, 16]");
        }
        if (psk_order < 2 || !is_power_of_two(static_cast<std::uint64_t>(psk_order))) {
            throw std::invalid_argument("SystemConfig: M must be a power of two >= 2");
        }
        if (!(transmit_power > 0) || !(noise_power > 0) || !(outage_threshold > 0) ||
            !(avg_channel_gain > 0)) {
            throw std::invalid_argument("SystemConfig: real parameters must be strictly positive");
        }
    }

    double snr_linear() const { return transmit_power / noise_power; }
    double snr_db() const { return 10.0 * std::log10(snr_linear()); }

    // Returns a copy with P_t set so that P_t/N_0 equals the given dB value.
    SystemConfig at_snr_db(double snr_db) const {
        SystemConfig c = *this;
        c.transmit_power = c.noise_power * std::pow(10.0, snr_db / 10.0);
        return c;
    }
};

}  // namespace snm
