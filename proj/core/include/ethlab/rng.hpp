#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ethlab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a sequence of words into one key; order-sensitive.
constexpr std::uint64_t mix_keys(std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (auto w : words) h = mix64(h ^ mix64(w));
    return h;
}

/// Domain tags keep the ensemble and observable seed streams disjoint.
enum class StreamDomain : std::uint64_t {
    ensemble = 0x656e73656d626c65ULL,
    observable = 0x6f62736572766162ULL,
    bootstrap = 0x626f6f7473747270ULL,
    trial = 0x747269616c736565ULL,
};

/// Counter-based generator: output k is mix64(key + k*gamma). Any (key, counter)
/// pair is reachable directly, so independent streams never need coordination.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    CounterRng(StreamDomain domain, std::uint64_t seed) noexcept
        : CounterRng(mix_keys({static_cast<std::uint64_t>(domain), seed})) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    /// Child stream; deterministic in (parent key, index).
    [[nodiscard]] CounterRng split(std::uint64_t index) const noexcept {
        return CounterRng(mix_keys({key_, index}));
    }

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace ethlab
