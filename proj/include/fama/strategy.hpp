#ifndef FAMA_STRATEGY_HPP
#define FAMA_STRATEGY_HPP

#include <limits>

#include "channel.hpp"
#include "errors.hpp"

namespace fama {

struct PortChoice {
    int port = 0;
    double criterion_value = 0.0;
};

inline double sir_ratio(double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return x / y;
}

// max X/Y; strict comparison keeps the lowest index on ties
inline PortChoice select_wdt_port(const PortStatistics& s) {
    if (s.size() == 0) throw ValidationError("select_wdt_port: no ports");
    PortChoice best{0, sir_ratio(s.x[0], s.y[0])};
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double r = sir_ratio(s.x[k], s.y[k]);
        if (r > best.criterion_value) best = {static_cast<int>(k), r};
    }
    return best;
}

// max X + Y
inline PortChoice select_wet_port(const PortStatistics& s) {
    if (s.size() == 0) throw ValidationError("select_wet_port: no ports");
    PortChoice best{0, s.x[0] + s.y[0]};
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double v = s.x[k] + s.y[k];
        if (v > best.criterion_value) best = {static_cast<int>(k), v};
    }
    return best;
}

} // namespace fama

#endif
