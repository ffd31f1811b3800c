// rng.hpp - seeded, indexable random streams for reproducible parallel trials.

#pragma once

#include <cstdint>
#include <random>

namespace snm {

namespace detail {
// splitmix64 finalizer; decorrelates nearby (seed, index) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

constexpr std::uint64_t mix_streams(std::uint64_t a, std::uint64_t b) {
    return detail::splitmix64(detail::splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t mix_streams(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_streams(mix_streams(a, b), c);
}

// One reproducible random stream identified by (master_seed, stream_index).
// Distinct pairs yield independent sequences; the same pair always replays
// the same sequence, independent of any other stream's consumption.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed),
          stream_index_(stream_index),
          gen_(mix_streams(master_seed, stream_index)) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64() { return gen_(); }

    // Standard normal.
    double normal() { return normal_(gen_); }

    // Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(gen_); }

    // Uniform integer on [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
    }

    // Exponential with the given mean.
    double exponential(double mean) {
        return std::exponential_distribution<double>(1.0 / mean)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace snm
