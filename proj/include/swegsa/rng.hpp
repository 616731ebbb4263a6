#pragma once

// Counter-based random numbers: Philox4x32-10 keyed by a study seed, indexed
// by (stream, counter). Any draw can be regenerated in isolation, so samplers
// stay reproducible no matter how work is split across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace swegsa {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
    constexpr std::uint64_t M0 = 0xD2511F53ull;
    constexpr std::uint64_t M1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = M0 * c[0];
    const std::uint64_t p1 = M1 * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) detail::philox_round(counter, key);
    return counter;
}

/// Inverse standard normal CDF (Wichura's algorithm AS 241, double precision).
inline double normal_quantile(double p) {
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0) ? p : 1.0 - p;
    if (r <= 0.0) return (q < 0) ? -HUGE_VAL : HUGE_VAL;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0) ? -x : x;
}

/// Stateless generator: every value is a pure function of (seed, stream, index).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
        auto out = philox4x32(ctr, key);
        return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    }

    /// Uniform draw strictly inside (0,1); 53-bit resolution.
    double uniform01(std::uint64_t stream, std::uint64_t index) const {
        const std::uint64_t u53 = bits(stream, index) >> 11;
        return (static_cast<double>(u53) + 0.5) * 0x1p-53;
    }

    double normal(std::uint64_t stream, std::uint64_t index) const {
        return normal_quantile(uniform01(stream, index));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

/// FNV-1a hash, used for run checksums and derived seeds.
struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ull;
    void add_bytes(const void* data, std::size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    }
    void add_u64(std::uint64_t v) { add_bytes(&v, sizeof v); }
    void add_double(double v) { add_bytes(&v, sizeof v); }
    void add_string(const std::string& s) { add_bytes(s.data(), s.size()); }
};

}  // namespace swegsa
