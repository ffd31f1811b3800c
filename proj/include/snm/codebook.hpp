// codebook.hpp - bit stream <-> activation pattern <-> OFDM block mapping.
//
// The codebook enumerates every legitimate block: a heading word selects the
// number of active subcarriers T, a variable-length payload word selects the
// PSK symbols carried on them. Where the active subcarriers sit depends on
// the scheme: the CSI-aware mapping places them on the T largest channel
// power gains, the fixed baseline always uses subcarriers 1..T, and the
// halved variant runs the CSI-aware mapping over the best N/2 subcarriers.

#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "snm/bitword.hpp"
#include "snm/config.hpp"

namespace snm {

enum class Scheme { enhanced, original, halved };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::enhanced: return "enhanced";
        case Scheme::original: return "original";
        case Scheme::halved: return "halved";
    }
    return "?";
}

// Activation state vector S(k): which of the N subcarriers carry a symbol.
struct Sap {
    std::vector<std::uint8_t> active;  // length N, 0/1
    int t = 0;                         // population count

    bool is_active(int n) const { return active[static_cast<std::size_t>(n)] != 0; }
};

// Frequency-domain block x(k): unit-modulus symbols on active subcarriers,
// exact zeros elsewhere.
struct OfdmBlock {
    std::vector<std::complex<double>> symbols;
    Sap sap;
};

struct CodebookEntry {
    int index = 0;        // position in canonical order, 0-based
    BitWord heading;      // fixed-length word selecting T
    BitWord subsequent;   // T * log2(M) payload bits
    OfdmBlock block;

    // Active subcarriers in ascending index order with their symbols;
    // payload bits are consumed in this order.
    std::vector<int> active_indices;
    std::vector<std::complex<double>> active_symbols;

    int active_count() const { return block.sap.t; }
    std::size_t bit_length() const { return heading.size() + subsequent.size(); }
};

// --- core operations ---------------------------------------------------

inline int heading_length(int n_subcarriers) {
    if (n_subcarriers < 2) throw std::invalid_argument("heading_length: N must be >= 2");
    int e = 0;
    while ((1 << (e + 1)) <= n_subcarriers) ++e;
    return e;  // floor(log2 N)
}

inline int active_count_from_heading(const BitWord& heading) {
    if (heading.empty()) throw std::invalid_argument("active_count_from_heading: empty heading");
    return static_cast<int>(heading.value()) + 1;
}

inline BitWord heading_from_active_count(int t, int heading_bits) {
    if (t < 1 || t > (1 << heading_bits)) {
        throw std::invalid_argument("heading_from_active_count: t out of range");
    }
    return BitWord::from_value(static_cast<std::uint64_t>(t - 1),
                               static_cast<std::size_t>(heading_bits));
}

// Average transmission rate in bpcu: log2(N) + (N+1)/2 * log2(M).
inline double average_rate(int n_subcarriers, int psk_order) {
    if (!is_power_of_two(static_cast<std::uint64_t>(n_subcarriers)) || n_subcarriers < 2 ||
        !is_power_of_two(static_cast<std::uint64_t>(psk_order)) || psk_order < 2) {
        throw std::invalid_argument("average_rate: N and M must be powers of two >= 2");
    }
    const double bits_per_symbol = log2_exact(static_cast<std::uint64_t>(psk_order));
    return log2_exact(static_cast<std::uint64_t>(n_subcarriers)) +
           0.5 * (n_subcarriers + 1) * bits_per_symbol;
}

// M-PSK symbol for a log2(M)-bit word. Natural binary value v maps to
// -exp(i*2*pi*v/M); the global rotation makes BPSK come out as 0 -> -1,
// 1 -> +1. BPSK/QPSK points are produced exactly.
inline std::complex<double> psk_symbol(const BitWord& word, int psk_order) {
    if (psk_order < 2 || !is_power_of_two(static_cast<std::uint64_t>(psk_order))) {
        throw std::invalid_argument("psk_symbol: M must be a power of two >= 2");
    }
    const int bits = log2_exact(static_cast<std::uint64_t>(psk_order));
    if (word.size() != static_cast<std::size_t>(bits)) {
        throw std::invalid_argument("psk_symbol: word length must equal log2(M)");
    }
    const std::uint64_t v = word.value();
    if (psk_order == 2) {
        return {v ? 1.0 : -1.0, 0.0};
    }
    if (psk_order == 4) {
        switch (v) {
            case 0: return {-1.0, 0.0};
            case 1: return {0.0, -1.0};
            case 2: return {1.0, 0.0};
            default: return {0.0, 1.0};
        }
    }
    const double pi = 3.14159265358979323846;
    return std::polar(1.0, pi + 2.0 * pi * static_cast<double>(v) / psk_order);
}

// Indices (0-based, ascending) of the t largest gains; ties go to the lower
// index. This maximizes the gain sum over all subsets of size t.
inline std::vector<int> assign_subcarriers(const std::vector<double>& gains, int t) {
    const int n = static_cast<int>(gains.size());
    if (t < 1 || t > n) throw std::invalid_argument("assign_subcarriers: t out of range");
    for (double g : gains) {
        if (g < 0) throw std::invalid_argument("assign_subcarriers: gains must be non-negative");
    }
    std::vector<int> order(gains.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gains[static_cast<std::size_t>(a)] >
                                                gains[static_cast<std::size_t>(b)]; });
    order.resize(static_cast<std::size_t>(t));
    std::sort(order.begin(), order.end());
    return order;
}

// --- codebook -----------------------------------------------------------

class Codebook {
public:
    Codebook(std::vector<double> gains, const SystemConfig& config,
             Scheme scheme = Scheme::enhanced)
        : n_(config.n_subcarriers),
          m_(config.psk_order),
          scheme_(scheme) {
        config.validate();
        if (static_cast<int>(gains.size()) != n_) {
            throw std::invalid_argument("Codebook: gains size must equal N");
        }
        if (scheme == Scheme::halved && n_ < 4) {
            throw std::invalid_argument("Codebook: halved scheme requires N >= 4");
        }
        n_eff_ = (scheme == Scheme::halved) ? n_ / 2 : n_;
        heading_bits_ = heading_length(n_eff_);
        bits_per_symbol_ = log2_exact(static_cast<std::uint64_t>(m_));
        build_grammar();
        rebuild(gains);
    }

    // Re-derive the CSI-dependent placement for a new channel snapshot,
    // reusing the enumerated grammar. No allocation on the hot path.
    void rebuild(const std::vector<double>& gains) {
        if (static_cast<int>(gains.size()) != n_) {
            throw std::invalid_argument("Codebook::rebuild: gains size must equal N");
        }
        gains_ = gains;
        // One gain ranking serves every T: the top-t sets are nested.
        ranking_.resize(gains.size());
        std::iota(ranking_.begin(), ranking_.end(), 0);
        if (scheme_ != Scheme::original) {
            std::stable_sort(ranking_.begin(), ranking_.end(), [&](int a, int b) {
                return gains[static_cast<std::size_t>(a)] > gains[static_cast<std::size_t>(b)];
            });
        }
        for (int t = 1; t <= n_eff_; ++t) {
            auto& p = placement_[static_cast<std::size_t>(t - 1)];
            p.assign(ranking_.begin(), ranking_.begin() + t);
            std::sort(p.begin(), p.end());
        }
        for (auto& e : entries_) {
            const auto& p = placement_[static_cast<std::size_t>(e.active_count() - 1)];
            e.active_indices = p;
            std::fill(e.block.sap.active.begin(), e.block.sap.active.end(), std::uint8_t{0});
            std::fill(e.block.symbols.begin(), e.block.symbols.end(),
                      std::complex<double>{0.0, 0.0});
            for (std::size_t j = 0; j < p.size(); ++j) {
                const auto idx = static_cast<std::size_t>(p[j]);
                e.block.sap.active[idx] = 1;
                e.block.symbols[idx] = e.active_symbols[j];
            }
        }
    }

    const std::vector<CodebookEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    int n_subcarriers() const { return n_; }
    int effective_subcarriers() const { return n_eff_; }
    int psk_order() const { return m_; }
    int heading_bits() const { return heading_bits_; }
    Scheme scheme() const { return scheme_; }
    const std::vector<double>& gains() const { return gains_; }

    static std::uint64_t cardinality(int n_eff, int m) {
        std::uint64_t sum = 0, pw = 1;
        for (int t = 1; t <= n_eff; ++t) {
            pw *= static_cast<std::uint64_t>(m);
            sum += pw;
        }
        return sum;  // M(M^N - 1)/(M - 1)
    }

    const CodebookEntry& entry_for(int t, std::uint64_t subsequent_value) const {
        if (t < 1 || t > n_eff_) throw std::invalid_argument("entry_for: t out of range");
        const std::uint64_t idx = t_offset_[static_cast<std::size_t>(t - 1)] + subsequent_value;
        if (subsequent_value >= pow_m_[static_cast<std::size_t>(t)]) {
            throw std::invalid_argument("entry_for: subsequent value out of range");
        }
        return entries_[static_cast<std::size_t>(idx)];
    }

    const CodebookEntry& encode(const BitWord& bits) const {
        if (bits.size() < static_cast<std::size_t>(heading_bits_)) {
            throw std::invalid_argument("encode: bit stream shorter than heading");
        }
        const BitWord heading = bits.slice(0, static_cast<std::size_t>(heading_bits_));
        const int t = active_count_from_heading(heading);
        const std::size_t expected =
            static_cast<std::size_t>(heading_bits_) +
            static_cast<std::size_t>(t) * static_cast<std::size_t>(bits_per_symbol_);
        if (bits.size() != expected) {
            throw std::invalid_argument("encode: bit length does not match heading-implied length");
        }
        const std::uint64_t sv =
            bits.slice(static_cast<std::size_t>(heading_bits_), expected - heading_bits_).value();
        return entry_for(t, sv);
    }

    static BitWord decode(const CodebookEntry& entry) {
        BitWord bits = entry.heading;
        bits.append(entry.subsequent);
        return bits;
    }

private:
    void build_grammar() {
        pow_m_.resize(static_cast<std::size_t>(n_eff_) + 1);
        pow_m_[0] = 1;
        for (int t = 1; t <= n_eff_; ++t) {
            pow_m_[static_cast<std::size_t>(t)] =
                pow_m_[static_cast<std::size_t>(t - 1)] * static_cast<std::uint64_t>(m_);
        }
        t_offset_.resize(static_cast<std::size_t>(n_eff_));
        std::uint64_t off = 0;
        for (int t = 1; t <= n_eff_; ++t) {
            t_offset_[static_cast<std::size_t>(t - 1)] = off;
            off += pow_m_[static_cast<std::size_t>(t)];
        }
        placement_.resize(static_cast<std::size_t>(n_eff_));

        // PSK alphabet, indexed by the natural binary value of the word.
        std::vector<std::complex<double>> alphabet(static_cast<std::size_t>(m_));
        for (int v = 0; v < m_; ++v) {
            alphabet[static_cast<std::size_t>(v)] = psk_symbol(
                BitWord::from_value(static_cast<std::uint64_t>(v),
                                    static_cast<std::size_t>(bits_per_symbol_)),
                m_);
        }

        entries_.clear();
        entries_.reserve(static_cast<std::size_t>(cardinality(n_eff_, m_)));
        int index = 0;
        for (int t = 1; t <= n_eff_; ++t) {
            const BitWord heading = heading_from_active_count(t, heading_bits_);
            const std::size_t sub_len =
                static_cast<std::size_t>(t) * static_cast<std::size_t>(bits_per_symbol_);
            for (std::uint64_t sv = 0; sv < pow_m_[static_cast<std::size_t>(t)]; ++sv) {
                CodebookEntry e;
                e.index = index++;
                e.heading = heading;
                e.subsequent = BitWord::from_value(sv, sub_len);
                e.active_symbols.resize(static_cast<std::size_t>(t));
                for (int j = 0; j < t; ++j) {
                    const auto word = e.subsequent.slice(
                        static_cast<std::size_t>(j) * static_cast<std::size_t>(bits_per_symbol_),
                        static_cast<std::size_t>(bits_per_symbol_));
                    e.active_symbols[static_cast<std::size_t>(j)] =
                        alphabet[static_cast<std::size_t>(word.value())];
                }
                e.block.symbols.assign(static_cast<std::size_t>(n_), {0.0, 0.0});
                e.block.sap.active.assign(static_cast<std::size_t>(n_), 0);
                e.block.sap.t = t;
                entries_.push_back(std::move(e));
            }
        }
    }

    int n_;
    int n_eff_;
    int m_;
    Scheme scheme_;
    int heading_bits_;
    int bits_per_symbol_;
    std::vector<double> gains_;
    std::vector<int> ranking_;
    std::vector<std::vector<int>> placement_;  // [t-1] -> active indices, ascending
    std::vector<std::uint64_t> pow_m_;
    std::vector<std::uint64_t> t_offset_;
    std::vector<CodebookEntry> entries_;
};

}  // namespace snm
