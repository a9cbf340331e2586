#pragma once

#include <cstdint>
#include <limits>

namespace geqie {

/// SplitMix64 output finalizer (Steele, Lea, Flood 2014).
constexpr uint64_t mix64(uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Maps the top 53 bits of a 64-bit word onto [0, 1).
constexpr double to_unit_interval(uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Sub-seed for an independent stream, e.g. one shot, one benchmark cell or one worker.
///
/// Streams are named, not positional: the same (seed, stream_id) pair always yields the same sub-seed
/// regardless of how work is partitioned across threads.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t stream_id) noexcept {
    return seed ^ mix64(stream_id + 0x632BE59BD9B4E019ULL);
}

/// Counter-based 64-bit generator.
///
/// Output i of stream `key` is mix64(key + (i + 1) * golden), i.e. the SplitMix64 sequence started at
/// `key`. Because every draw is addressable as (key, counter), a batch of draws can be split across
/// workers without changing any individual value. There is no global state.
///
/// Satisfies UniformRandomBitGenerator, so it also plugs into <random> distributions.
class CounterRng {
public:
    using result_type = uint64_t;

    static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit constexpr CounterRng(uint64_t key, uint64_t counter = 0) noexcept : key_(key), counter_(counter) {
    }

    static constexpr result_type min() noexcept {
        return 0;
    }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    static constexpr uint64_t at(uint64_t key, uint64_t counter) noexcept {
        return mix64(key + (counter + 1) * kGolden);
    }
    static constexpr double uniform_at(uint64_t key, uint64_t counter) noexcept {
        return to_unit_interval(at(key, counter));
    }

    constexpr result_type operator()() noexcept {
        return at(key_, counter_++);
    }
    constexpr double uniform() noexcept {
        return to_unit_interval((*this)());
    }

    constexpr uint64_t key() const noexcept {
        return key_;
    }
    constexpr uint64_t counter() const noexcept {
        return counter_;
    }

private:
    uint64_t key_;
    uint64_t counter_;
};

}  // namespace geqie
