#ifndef FAMA_CHANNEL_HPP
#define FAMA_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace fama {

// Counter layout: (trial, ue | tag, antenna, slot). Slot 0 carries the common
// term x0 + j y0 of an antenna, slot k + 1 the private term of port k. Ports
// therefore keep their normals when K grows, which nests the K sweeps.
struct TrialStream {
    Philox4x32::key_type key{};
    std::uint64_t trial = 0;

    TrialStream() = default;
    TrialStream(std::uint64_t seed, std::uint64_t trial_index) : key(seed_key(seed)), trial(trial_index) {}

    std::array<double, 2> normals(int ue, int antenna, std::uint32_t slot) const {
        return normal_pair(key, {static_cast<std::uint32_t>(trial),
                                 static_cast<std::uint32_t>(trial >> 32) ^ (static_cast<std::uint32_t>(ue) << 20),
                                 static_cast<std::uint32_t>(antenna), slot});
    }
};

enum class FadingModel { rayleigh, rician };

struct ChannelRealization {
    int ue_index = 0;
    int n_ports = 0;
    int n_antennas = 0;
    FadingModel model = FadingModel::rayleigh;
    double omega = 1.0; // path gain, used by the Rician form only
    double kappa = 0.0;
    std::vector<std::complex<double>> gains; // row-major, entry [k * N + m]

    std::complex<double> at(int k, int m) const { return gains[static_cast<std::size_t>(k) * n_antennas + m]; }
    std::complex<double>& at(int k, int m) { return gains[static_cast<std::size_t>(k) * n_antennas + m]; }

    void resize(int K, int N) {
        n_ports = K;
        n_antennas = N;
        gains.assign(static_cast<std::size_t>(K) * N, {});
    }
};

struct PortStatistics {
    std::vector<double> x; // desired power per port
    std::vector<double> y; // interference power per port
    bool degenerate = false; // mu = 1: raw powers, no normalization

    std::size_t size() const { return x.size(); }
};

// In-place form used by the simulation loops.
inline void generate_rayleigh(const SystemConfig& cfg, double mu, int ue, const TrialStream& rng,
                              ChannelRealization& out) {
    const int N = cfg.n_users, K = cfg.n_ports;
    out.resize(K, N);
    out.ue_index = ue;
    out.model = FadingModel::rayleigh;
    out.omega = 1.0;
    out.kappa = 0.0;
    const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int m = 0; m < N; ++m) {
        const auto c = rng.normals(ue, m, 0);
        const std::complex<double> common(mu * c[0], mu * c[1]);
        for (int k = 0; k < K; ++k) {
            const auto p = rng.normals(ue, m, static_cast<std::uint32_t>(k) + 1u);
            out.at(k, m) = std::complex<double>(s * p[0], s * p[1]) + common;
        }
    }
}

inline ChannelRealization generate_rayleigh(const SystemConfig& cfg, int ue, const TrialStream& rng) {
    ChannelRealization r;
    generate_rayleigh(cfg, cfg.correlation(), ue, rng, r);
    return r;
}

// LoS phases, one per BS antenna, fixed for the whole scenario.
inline std::vector<double> los_phases(const SystemConfig& cfg, int ue, std::uint64_t seed) {
    std::vector<double> ph(cfg.n_users);
    const auto key = seed_key(seed);
    for (int m = 0; m < cfg.n_users; ++m)
        ph[m] = 2.0 * std::numbers::pi *
                uniform01(key, {0xFFFFFFFFu, 0x80000000u | static_cast<std::uint32_t>(ue), static_cast<std::uint32_t>(m),
                                0xFFFFFFFFu});
    return ph;
}

// h = sqrt(2 k Omega/(k+1)) e^{j w} + sqrt(Omega/(k+1)) g, with g the Rayleigh draw.
// Mean power per antenna is 2 Omega for every k, so k = 0 is exactly the Rayleigh channel.
inline void generate_rician(const SystemConfig& cfg, double mu, int ue, const std::vector<double>& phases,
                            const TrialStream& rng, ChannelRealization& out) {
    if (static_cast<int>(phases.size()) != cfg.n_users)
        throw ValidationError("generate_rician: need one LoS phase per BS antenna");
    if (!(cfg.rician_k >= 0.0)) throw ValidationError("generate_rician: rician_k must be non-negative");
    generate_rayleigh(cfg, mu, ue, rng, out);
    const double omega = cfg.path_gain(), kappa = cfg.rician_k;
    const double a = std::sqrt(2.0 * kappa * omega / (kappa + 1.0));
    const double b = std::sqrt(omega / (kappa + 1.0));
    for (int m = 0; m < cfg.n_users; ++m) {
        const std::complex<double> los = std::polar(a, phases[m]);
        for (int k = 0; k < cfg.n_ports; ++k) out.at(k, m) = los + b * out.at(k, m);
    }
    out.model = FadingModel::rician;
    out.omega = omega;
    out.kappa = kappa;
}

inline ChannelRealization generate_rician(const SystemConfig& cfg, int ue, const std::vector<double>& phases,
                                          const TrialStream& rng) {
    ChannelRealization r;
    generate_rician(cfg, cfg.correlation(), ue, phases, rng, r);
    return r;
}

inline void port_statistics(const ChannelRealization& real, double mu, PortStatistics& out) {
    const int K = real.n_ports, N = real.n_antennas, i = real.ue_index;
    out.x.resize(K);
    out.y.resize(K);
    const double one_minus = 1.0 - mu * mu;
    out.degenerate = !(one_minus > 0.0);
    double scale = out.degenerate ? 1.0 : 1.0 / one_minus;
    if (real.model == FadingModel::rician) scale *= (real.kappa + 1.0) / real.omega;
    for (int k = 0; k < K; ++k) {
        double des = 0.0, itf = 0.0;
        for (int m = 0; m < N; ++m) {
            const double p = std::norm(real.at(k, m));
            if (m == i)
                des = p;
            else
                itf += p;
        }
        out.x[k] = des * scale;
        out.y[k] = itf * scale;
    }
}

inline PortStatistics port_statistics(const ChannelRealization& real, const SystemConfig& cfg) {
    PortStatistics s;
    port_statistics(real, cfg.correlation(), s);
    return s;
}

inline double sinr_at_port(const ChannelRealization& real, int k) {
    if (real.n_antennas < 2) throw ValidationError("sinr_at_port: needs at least two BS antennas");
    if (k < 0 || k >= real.n_ports) throw ValidationError("sinr_at_port: port index out of range");
    double des = 0.0, itf = 0.0;
    for (int m = 0; m < real.n_antennas; ++m) {
        const double p = std::norm(real.at(k, m));
        if (m == real.ue_index)
            des = p;
        else
            itf += p;
    }
    if (des == 0.0) return 0.0;
    if (itf == 0.0) return std::numeric_limits<double>::infinity();
    return des / itf;
}

// harvested power at port k, watts
inline double ehp_at_port(const ChannelRealization& real, int k, const SystemConfig& cfg) {
    if (k < 0 || k >= real.n_ports) throw ValidationError("ehp_at_port: port index out of range");
    double tot = 0.0;
    for (int m = 0; m < real.n_antennas; ++m) tot += std::norm(real.at(k, m));
    // the Rician gains already carry Omega
    const double loss = real.model == FadingModel::rician ? 1.0 : cfg.path_gain();
    return (1.0 - cfg.ps_ratio) * cfg.tx_power * loss * tot;
}

} // namespace fama

#endif
