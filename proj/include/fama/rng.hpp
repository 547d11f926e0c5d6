#ifndef FAMA_RNG_HPP
#define FAMA_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fama {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), so trials can be generated in any order on any thread.
struct Philox4x32 {
    using ctr_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static ctr_type block(ctr_type c, key_type k) {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
            c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
            k[0] += W0;
            k[1] += W1;
        }
        return c;
    }
};

inline Philox4x32::key_type seed_key(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// uniform in (0, 1) from 52 random bits; the half step keeps both ends open
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 20) | (lo >> 12);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

// Two independent standard normals per counter (Box-Muller).
inline std::array<double, 2> normal_pair(const Philox4x32::key_type& key, const Philox4x32::ctr_type& ctr) {
    const auto r = Philox4x32::block(ctr, key);
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(th), rad * std::sin(th)};
}

inline double uniform01(const Philox4x32::key_type& key, const Philox4x32::ctr_type& ctr) {
    const auto r = Philox4x32::block(ctr, key);
    return to_open_unit(r[0], r[1]);
}

} // namespace fama

#endif
