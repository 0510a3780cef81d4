#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fracfluct {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed of an independent stream identified by a master seed and a tag tuple,
// e.g. derive_seed(master, {stream::fbm, replicate}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = mix64(master);
    for (auto t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ull));
    return h;
}

namespace stream {
inline constexpr std::uint64_t fbm = 1;
inline constexpr std::uint64_t fast = 2;
inline constexpr std::uint64_t limit_noise = 3;
inline constexpr std::uint64_t limit_driver = 4;
inline constexpr std::uint64_t bootstrap = 5;
inline constexpr std::uint64_t perturbation = 6;
inline constexpr std::uint64_t instance = 7;
}  // namespace stream

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : eng_(seed) {}
    double operator()() { return dist_(eng_); }
    Engine& engine() { return eng_; }

private:
    Engine eng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace fracfluct
