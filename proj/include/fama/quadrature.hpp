#ifndef FAMA_QUADRATURE_HPP
#define FAMA_QUADRATURE_HPP

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fama {

namespace detail {

inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

} // namespace detail

class NeumaierSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    NeumaierSum& operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussRule build_legendre(int n) {
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        g.nodes[i] = -z;
        g.nodes[n - 1 - i] = z;
        g.weights[i] = g.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return g;
}

// weight x^alpha e^{-x} on [0, inf), normalized so the weights sum to one
inline GaussRule build_laguerre(int n, double alpha) {
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * n + 1.8 * alpha);
        } else if (i == 1) {
            z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * n);
        } else {
            double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) * (z - g.nodes[i - 2]) /
                 (1.0 + 0.3 * alpha);
        }
        double p1 = 0.0, p2 = 0.0, pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 + alpha - z) * p2 - (j - 1.0 + alpha) * p3) / j;
            }
            pp = (n * p1 - (n + alpha) * p2) / z;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * std::fabs(z)) break;
        }
        g.nodes[i] = z;
        // log-domain weight, divided by Gamma(alpha + 1)
        double lw = log_gamma(alpha + n) - log_gamma(static_cast<double>(n)) - log_gamma(alpha + 1.0);
        g.weights[i] = -std::exp(lw) / (pp * n * p2);
    }
    return g;
}

template <class Key, class Build>
const GaussRule& cached_rule(const Key& key, Build build) {
    static std::mutex lock;
    static std::map<Key, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<GaussRule>(build())).first;
    return *it->second;
}

} // namespace detail

// Gauss-Legendre on [-1, 1]
inline const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
    return detail::cached_rule(n, [n] { return detail::build_legendre(n); });
}

// generalized Gauss-Laguerre for x^alpha e^{-x}, weights summing to 1
inline const GaussRule& gauss_laguerre(int n, double alpha = 0.0) {
    if (n < 1 || !(alpha > -1.0)) throw ValidationError("gauss_laguerre: need n >= 1 and alpha > -1");
    return detail::cached_rule(std::make_pair(n, alpha), [n, alpha] { return detail::build_laguerre(n, alpha); });
}

// nodes and weights of the Legendre rule mapped onto [a, b]
inline GaussRule legendre_on(int n, double a, double b) {
    const GaussRule& g = gauss_legendre(n);
    GaussRule out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = c + h * g.nodes[i];
        out.weights[i] = h * g.weights[i];
    }
    return out;
}

} // namespace fama

#endif
