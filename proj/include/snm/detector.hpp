// detector.hpp - exhaustive ML block detection and secondary-user
// interference injection for the multi-user scenarios.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "snm/channel.hpp"
#include "snm/codebook.hpp"
#include "snm/rng.hpp"

namespace snm {

struct DetectionResult {
    const CodebookEntry* entry = nullptr;  // decided block, owned by the codebook
    int index = -1;
    double metric = 0.0;                   // minimum Frobenius distance
    bool block_error = false;              // set by the caller when truth is known
};

// argmin over all legitimate blocks of ||y - sqrt(P_t/T) H x||_F.
// Ties (a measure-zero event under continuous noise) go to the lowest
// canonical entry index.
inline DetectionResult ml_detect(const ReceivedBlock& received, const ChannelRealization& channel,
                                 const Codebook& codebook, const SystemConfig& config) {
    if (codebook.size() == 0) throw std::invalid_argument("ml_detect: empty codebook");
    const std::size_t n = received.samples.size();
    if (channel.coefficients.size() != n) {
        throw std::invalid_argument("ml_detect: received/channel dimension mismatch");
    }

    // ||y - c H x||^2 = ||y||^2 + sum over active n of the correction term;
    // inactive subcarriers contribute |y(n)|^2 to every candidate alike.
    double base = 0.0;
    for (const auto& y : received.samples) base += std::norm(y);

    double best = std::numeric_limits<double>::infinity();
    int best_index = 0;
    for (const auto& e : codebook.entries()) {
        const double amp = std::sqrt(config.transmit_power / e.active_count());
        double metric = base;
        for (std::size_t j = 0; j < e.active_indices.size(); ++j) {
            const auto idx = static_cast<std::size_t>(e.active_indices[j]);
            const std::complex<double> r =
                received.samples[idx] - amp * channel.coefficients[idx] * e.active_symbols[j];
            metric += std::norm(r) - std::norm(received.samples[idx]);
        }
        if (metric < best) {
            best = metric;
            best_index = e.index;
        }
    }
    DetectionResult result;
    result.index = best_index;
    result.entry = &codebook.entries()[static_cast<std::size_t>(best_index)];
    result.metric = std::sqrt(std::max(best, 0.0));
    return result;
}

// Secondary users opportunistically filling subcarriers left idle by the
// primary transmission.
struct MultiUserScenario {
    enum class Protocol { unregulated, regulated };

    int n_secondary = 1;            // L
    double secondary_power = 1.0;   // P_s
    double interference_gain = 0.2; // theta, mean of the interference channel gain
    double transmission_gain = 1.0; // varrho, mean of the secondary's own channel gain
    Protocol protocol = Protocol::unregulated;
    double threshold = 0.0;         // phi, regulated protocol only

    void validate() const {
        if (n_secondary < 1) throw std::invalid_argument("MultiUserScenario: L must be >= 1");
        if (!(secondary_power > 0) || !(interference_gain > 0) || !(transmission_gain > 0)) {
            throw std::invalid_argument("MultiUserScenario: powers and gains must be positive");
        }
        if (protocol == Protocol::regulated && !(threshold > 0)) {
            throw std::invalid_argument("MultiUserScenario: regulated protocol requires phi > 0");
        }
    }
};

// On each subcarrier idle under the primary SAP, the secondary with the
// lowest instantaneous interference power transmits a unit-power symbol
// (always for the unregulated protocol, only below the threshold phi for the
// regulated one). Active subcarriers are untouched.
inline ReceivedBlock add_secondary_interference(const ReceivedBlock& received,
                                                const Sap& primary_sap,
                                                const MultiUserScenario& scenario,
                                                RngStream& rng) {
    scenario.validate();
    if (received.samples.size() != primary_sap.active.size()) {
        throw std::invalid_argument("add_secondary_interference: dimension mismatch");
    }
    ReceivedBlock out = received;
    const double two_pi = 6.28318530717958647692;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        if (primary_sap.active[i]) continue;
        double g = rng.exponential(scenario.interference_gain);
        for (int l = 1; l < scenario.n_secondary; ++l) {
            g = std::min(g, rng.exponential(scenario.interference_gain));
        }
        const bool transmits = scenario.protocol == MultiUserScenario::Protocol::unregulated ||
                               scenario.secondary_power * g < scenario.threshold;
        if (transmits) {
            // sqrt(P_s) h_I s with |h_I|^2 = g and a uniform-phase unit symbol.
            const double phase = two_pi * rng.uniform();
            out.samples[i] += std::polar(std::sqrt(scenario.secondary_power * g), phase);
        }
    }
    return out;
}

}  // namespace snm
