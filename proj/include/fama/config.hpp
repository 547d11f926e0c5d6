#ifndef FAMA_CONFIG_HPP
#define FAMA_CONFIG_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "errors.hpp"
#include "specfun.hpp"

namespace fama {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

// One scenario. Thresholds are linear; dB conversion happens at the config parser.
struct SystemConfig {
    int n_users = 5;            // N
    int n_ports = 200;          // K
    double fa_size = 5.0;       // W, in wavelengths
    std::optional<double> mu;   // overrides the value derived from fa_size
    double ps_ratio = 0.5;      // rho
    double tx_power = 1.0;      // P, watts
    double distance = 10.0;     // d, meters
    double pathloss_exp = 2.0;  // beta
    double sinr_threshold = db_to_linear(3.0);
    double ehp_threshold = 0.010; // watts
    double rician_k = 0.0;
    double bandwidth = 1e6;     // hertz
    double fixed_power = 0.5;   // P_C, watts

    double correlation() const { return mu ? *mu : mu_from_w(fa_size); }

    // Omega = d^-beta
    double path_gain() const { return std::pow(distance, -pathloss_exp); }

    // Q_th normalized so that the WET outage event reads X + Y < q_hat
    double q_hat(double mu_value) const {
        if (ehp_threshold == 0.0) return 0.0;
        const double den = (1.0 - mu_value * mu_value) * (1.0 - ps_ratio) * tx_power * path_gain();
        if (den <= 0.0) return std::numeric_limits<double>::infinity();
        return ehp_threshold / den;
    }
    double q_hat() const { return q_hat(correlation()); }

    // same without the (1 - mu^2) factor; the raw sum of |g|^2 is compared to it
    double q_tilde() const {
        if (ehp_threshold == 0.0) return 0.0;
        const double den = (1.0 - ps_ratio) * tx_power * path_gain();
        if (den <= 0.0) return std::numeric_limits<double>::infinity();
        return ehp_threshold / den;
    }

    void validate() const {
        auto fail = [](const std::string& m) { throw ValidationError("config: " + m); };
        if (n_users < 2) fail("n_users must be at least 2 (the interference-limited SIR needs N >= 2)");
        if (n_ports < 1) fail("n_ports must be at least 1");
        if (!(fa_size > 0.0) || !std::isfinite(fa_size)) fail("fa_size must be positive");
        if (mu && !(*mu >= 0.0 && *mu <= 1.0)) fail("mu must lie in [0, 1]");
        if (!(ps_ratio >= 0.0 && ps_ratio <= 1.0)) fail("ps_ratio must lie in [0, 1]");
        if (!(tx_power > 0.0)) fail("tx_power must be positive");
        if (!(distance > 0.0)) fail("distance must be positive");
        if (!(pathloss_exp >= 0.0)) fail("pathloss_exp must be non-negative");
        if (!(sinr_threshold >= 0.0)) fail("sinr_threshold must be non-negative");
        if (!(ehp_threshold >= 0.0)) fail("ehp_threshold must be non-negative");
        if (!(rician_k >= 0.0) || !std::isfinite(rician_k)) fail("rician_k must be non-negative");
        if (!(bandwidth > 0.0)) fail("bandwidth must be positive");
        if (!(fixed_power >= 0.0)) fail("fixed_power must be non-negative");
    }
};

} // namespace fama

#endif
