#pragma once

// Reproducible random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every distribution below is implemented
// here (inversion on 53-bit uniforms) so results do not depend on the
// standard library's distribution code. Substreams are seeded through
// splitmix64 of (seed, stream id).

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace atomlink {

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr std::string_view generator_name() { return "mt19937_64+splitmix64"; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Independent generator for substream `id`, deterministic in (seed, stream, id).
    Rng derive(std::uint64_t id) const;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    bool bernoulli(double p);
    /// Trials up to and including the first success, >= 1. p must be in (0, 1].
    std::uint64_t geometric(double p);
    double exponential(double mean);
    std::uint64_t binomial(std::uint64_t n, double p);
    /// Index drawn with the given (not necessarily normalized) weights.
    std::size_t categorical(std::span<const double> weights);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

} // namespace atomlink
