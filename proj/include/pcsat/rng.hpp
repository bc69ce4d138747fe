#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

namespace pcsat {

/// Seeded counter-style PRNG (splitmix64). Self-contained so that generated
/// sequences do not depend on standard-library internals, and cheap to fork
/// into independent streams via `derive_stream`.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return UINT64_MAX; }

    std::uint64_t operator()() { return next_u64(); }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double next_gaussian() {
        // Box-Muller, second value discarded to keep the engine stateless
        // beyond the counter.
        for (;;) {
            const double u1 = next_double();
            const double u2 = next_double();
            if (u1 <= 0.0) continue;
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
        }
    }

    /// Marsaglia-Tsang; valid for any alpha > 0.
    double next_gamma(double alpha) {
        if (alpha < 1.0) {
            const double u = next_double();
            return next_gamma(alpha + 1.0) * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            const double x = next_gaussian();
            const double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            const double v = t * t * t;
            const double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double next_beta(double a, double b) {
        const double x = next_gamma(a);
        const double y = next_gamma(b);
        return x / (x + y);
    }

    std::vector<double> next_dirichlet(std::span<const double> alpha) {
        std::vector<double> out(alpha.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            out[i] = next_gamma(alpha[i]);
            sum += out[i];
        }
        for (double& v : out) v /= sum;
        return out;
    }

    /// Exponential-gap method, exact for moderate rates.
    std::int64_t next_poisson(double rate) {
        std::int64_t n = 0;
        double acc = 0.0;
        for (;;) {
            const double u = next_double();
            acc += -std::log(u > 0.0 ? u : 0x1.0p-53);
            if (acc >= rate) return n;
            ++n;
        }
    }

    /// Index in [0, cdf-weights size) drawn proportionally to `weights`.
    std::size_t next_categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = next_double() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::uint64_t state_;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
}

inline std::uint64_t mix_str(std::uint64_t h, std::string_view s) {
    std::uint64_t f = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        f ^= c;
        f *= 0x100000001b3ULL;
    }
    return mix64(h, f);
}

inline void derive_accumulate(std::uint64_t&) {}

template <typename T, typename... Rest>
inline void derive_accumulate(std::uint64_t& h, const T& part, const Rest&... rest) {
    if constexpr (std::is_convertible_v<T, std::string_view>) {
        h = mix_str(h, std::string_view(part));
    } else {
        h = mix64(h, static_cast<std::uint64_t>(part));
    }
    derive_accumulate(h, rest...);
}

}  // namespace detail

/// Derives an independent stream seed from a master seed plus identifying
/// parts (trial index, group id, condition tag, ...). The derivation depends
/// only on the parts, never on scheduling order, so parallel execution cannot
/// change any stream.
template <typename... Parts>
std::uint64_t derive_stream(std::uint64_t master_seed, const Parts&... parts) {
    std::uint64_t h = detail::mix64(0x6a09e667f3bcc909ULL, master_seed);
    detail::derive_accumulate(h, parts...);
    return h;
}

}  // namespace pcsat
