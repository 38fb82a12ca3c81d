#include "atomlink/rng.hpp"

#include <cmath>
#include <limits>

#include "atomlink/error.hpp"

namespace atomlink {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2DULL))) {}

Rng Rng::derive(std::uint64_t id) const {
    return Rng(seed_, splitmix64(stream_) ^ (id + 1));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

bool Rng::bernoulli(double p) { return uniform() < p; }

std::uint64_t Rng::geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw ParameterError("geometric sampling needs p in (0,1]");
    }
    if (p == 1.0) {
        return 1;
    }
    const double u = uniform();
    const double k = std::floor(std::log1p(-u) / std::log1p(-p));
    if (k >= static_cast<double>(std::numeric_limits<std::uint64_t>::max() / 2)) {
        return std::numeric_limits<std::uint64_t>::max() / 2;
    }
    return static_cast<std::uint64_t>(k) + 1;
}

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform()); }

std::uint64_t Rng::binomial(std::uint64_t n, double p) {
    detail::require_probability(p, "binomial probability");
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        k += uniform() < p ? 1 : 0;
    }
    return k;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0.0)) {
        throw ParameterError("categorical weights must have positive sum");
    }
    const double target = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) {
            return i;
        }
    }
    // Round-off: land on the last non-zero weight.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) {
            return i;
        }
    }
    return weights.size() - 1;
}

} // namespace atomlink
