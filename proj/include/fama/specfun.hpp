#ifndef FAMA_SPECFUN_HPP
#define FAMA_SPECFUN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace fama {

struct Tolerance {
    double rel_tol = 1e-10;
    int max_terms = 10000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
            throw ValidationError("tolerance: rel_tol must lie in (0, 1e-3]");
        if (max_terms < 16) throw ValidationError("tolerance: max_terms must be at least 16");
    }
};

namespace detail {

[[noreturn]] inline void nonconvergent(const char* fn) {
    throw NumericalError(NumericalErrorKind::nonconvergence,
                         std::string(fn) + ": series did not converge within max_terms");
}

// double-double arithmetic, enough for the 1F2 cancellation
struct dd {
    double hi = 0.0, lo = 0.0;
};

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator*(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a + (b * -q1);
    double q2 = r.hi / b.hi;
    r = r + (b * -q2);
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return q + dd{q3, 0.0};
}

} // namespace detail

inline double pochhammer(double t, int k) {
    if (k < 0) throw ValidationError("pochhammer: k must be non-negative");
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= t + i;
    return p;
}

inline double log_poisson_pmf(std::int64_t k, double lam) {
    if (lam == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return static_cast<double>(k) * std::log(lam) - lam - detail::log_gamma(static_cast<double>(k) + 1.0);
}

// ---- incomplete gamma ----

namespace detail {

// prefactor x^s e^{-x} / Gamma(s) in log form
inline double log_gamma_prefactor(double s, double x) {
    return s * std::log(x) - x - log_gamma(s);
}

inline double gamma_p_series(double s, double x, const Tolerance& tol) {
    double ap = s, del = 1.0 / s, sum = del;
    for (int n = 0; n < tol.max_terms; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17)
            return sum * std::exp(log_gamma_prefactor(s, x));
    }
    nonconvergent("gamma_lower_reg");
}

inline double gamma_q_fraction(double s, double x, const Tolerance& tol) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= tol.max_terms; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) return std::exp(log_gamma_prefactor(s, x)) * h;
    }
    nonconvergent("gamma_upper_reg");
}

} // namespace detail

inline double gamma_lower_reg(double s, double x, const Tolerance& tol = {}) {
    if (!(s > 0.0) || !(x >= 0.0)) throw ValidationError("gamma_lower_reg: need s > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < s + 1.0) return std::min(1.0, detail::gamma_p_series(s, x, tol));
    return std::max(0.0, 1.0 - detail::gamma_q_fraction(s, x, tol));
}

inline double gamma_upper_reg(double s, double x, const Tolerance& tol = {}) {
    if (!(s > 0.0) || !(x >= 0.0)) throw ValidationError("gamma_upper_reg: need s > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < s + 1.0) return std::max(0.0, 1.0 - detail::gamma_p_series(s, x, tol));
    return std::min(1.0, detail::gamma_q_fraction(s, x, tol));
}

// ---- Bessel functions ----

inline double log_bessel_i(int n, double x, const Tolerance& tol = {}) {
    if (n < 0) throw ValidationError("bessel_i: order must be non-negative");
    if (!(x >= 0.0)) throw ValidationError("bessel_i: x must be non-negative");
    if (x == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double nd = n;
    if (x > std::max(40.0, 2.0 * nd * nd)) {
        // Hankel expansion of e^{-x} sqrt(2 pi x) I_n(x)
        const double mu4 = 4.0 * nd * nd;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            double next = -term * (mu4 - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
            if (std::fabs(next) > std::fabs(term)) break;
            term = next;
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        }
        return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
    }
    const double q = 0.25 * x * x;
    double r = 1.0, s = 1.0, log_scale = 0.0;
    for (int m = 1;; ++m) {
        if (m > tol.max_terms) detail::nonconvergent("bessel_i");
        r *= q / (static_cast<double>(m) * (m + nd));
        s += r;
        if (r < 1e-17 * s && m > q / (m + nd)) break;
        if (s > 1e280) {
            s *= 1e-280;
            r *= 1e-280;
            log_scale += 280.0 * std::numbers::ln10;
        }
    }
    return nd * std::log(0.5 * x) - detail::log_gamma(nd + 1.0) + std::log(s) + log_scale;
}

inline double bessel_i(int n, double x, const Tolerance& tol = {}) {
    double l = log_bessel_i(n, x, tol);
    if (l > 709.78)
        throw NumericalError(NumericalErrorKind::overflow, "bessel_i: result exceeds double range");
    return std::exp(l);
}

// e^{-x} I_n(x)
inline double bessel_i_scaled(int n, double x, const Tolerance& tol = {}) {
    return std::exp(log_bessel_i(n, x, tol) - x);
}

namespace detail {

// J0 and J1 together; series near the origin, Miller's backward recurrence elsewhere
inline void bessel_j01(double x, double& j0, double& j1) {
    const double ax = std::fabs(x);
    if (ax < 4.0) {
        const double q = -0.25 * ax * ax;
        double t0 = 1.0, s0 = 1.0, t1 = 0.5 * ax, s1 = t1;
        for (int m = 1; m < 60; ++m) {
            t0 *= q / (static_cast<double>(m) * m);
            t1 *= q / (static_cast<double>(m) * (m + 1));
            s0 += t0;
            s1 += t1;
            if (std::fabs(t0) < 1e-18 && std::fabs(t1) < 1e-18) break;
        }
        j0 = s0;
        j1 = x < 0 ? -s1 : s1;
        return;
    }
    int m = static_cast<int>(ax + 30.0 + 10.0 * std::cbrt(ax));
    m += m % 2;
    double bjp = 0.0, bj = 1e-30, norm = 0.0, saved1 = 0.0;
    for (int k = m; k >= 1; --k) {
        double bjm = 2.0 * k / ax * bj - bjp;
        bjp = bj;
        bj = bjm; // J_{k-1}
        if (k - 1 == 1) saved1 = bj;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * bj;
        if (std::fabs(bj) > 1e250) {
            bj *= 1e-250;
            bjp *= 1e-250;
            norm *= 1e-250;
            saved1 *= 1e-250;
        }
    }
    norm += bj;
    j0 = bj / norm;
    j1 = saved1 / norm;
    if (x < 0) j1 = -j1;
}

} // namespace detail

inline double bessel_j0(double x) {
    double j0, j1;
    detail::bessel_j01(x, j0, j1);
    return j0;
}

inline double bessel_j1(double x) {
    double j0, j1;
    detail::bessel_j01(x, j0, j1);
    return j1;
}

// ---- Marcum Q ----

namespace detail {

// Q_M(a,b) summed upward: sum_k Pois(k; lam) * Q(M+k, x)
inline double marcum_q_upward(int M, double lam, double x, const Tolerance& tol) {
    const std::int64_t mode = static_cast<std::int64_t>(std::floor(lam));
    const double lp_mode = log_poisson_pmf(mode, lam);
    const double ln_lam = std::log(lam), ln_x = std::log(x);
    std::int64_t k = mode;
    double lp = lp_mode;
    while (k > 0 && lp > lp_mode - 60.0) {
        lp += std::log(static_cast<double>(k) / lam);
        --k;
    }
    double s = M + static_cast<double>(k);
    double G = gamma_upper_reg(s, x, tol);
    double lpx = s * ln_x - x - log_gamma(s + 1.0);
    double sum = 0.0;
    for (int n = 0; n < tol.max_terms; ++n, ++k) {
        const double p = std::exp(lp);
        sum += p * std::min(G, 1.0);
        if (static_cast<double>(k) + 2.0 > lam) {
            const double ratio = lam / (k + 2.0);
            const double tail = p * (lam / (k + 1.0)) / (1.0 - ratio);
            if (tail <= 1e-17 * sum || (sum == 0.0 && tail < 1e-300)) return sum;
        }
        G += std::exp(lpx);
        lpx += ln_x - std::log(s + 1.0);
        s += 1.0;
        lp += ln_lam - std::log(static_cast<double>(k) + 1.0);
    }
    nonconvergent("marcum_q");
}

// 1 - Q_M(a,b) summed downward: sum_k Pois(k; lam) * P(M+k, x)
inline double marcum_q_complement_downward(int M, double lam, double x, const Tolerance& tol) {
    const std::int64_t mode = static_cast<std::int64_t>(std::floor(lam));
    const double lp_mode = log_poisson_pmf(mode, lam);
    const double ln_lam = std::log(lam), ln_x = std::log(x);
    std::int64_t k = mode;
    double lp = lp_mode;
    while (lp > lp_mode - 60.0) {
        lp += ln_lam - std::log(static_cast<double>(k) + 1.0);
        ++k;
    }
    double s = M + static_cast<double>(k);
    double P = gamma_lower_reg(s, x, tol);
    double sum = 0.0;
    for (int n = 0; n < tol.max_terms; ++n) {
        const double p = std::exp(lp);
        sum += p * std::min(P, 1.0);
        if (k == 0) return sum;
        if (static_cast<double>(k) - 1.0 < lam) {
            const double below = std::exp(lp + std::log(static_cast<double>(k) / lam));
            const double tail = below / (1.0 - (k - 1.0) / lam);
            if (tail <= 1e-17 * sum || (sum == 0.0 && tail < 1e-300)) return sum;
        }
        // P(s-1, x) = P(s, x) + x^{s-1} e^{-x} / Gamma(s)
        P += std::exp((s - 1.0) * ln_x - x - log_gamma(s));
        s -= 1.0;
        lp += std::log(static_cast<double>(k) / lam);
        --k;
    }
    nonconvergent("marcum_q");
}

inline void check_marcum_args(int M, double a, double b) {
    if (M < 1) throw ValidationError("marcum_q: order must be >= 1");
    if (!(a >= 0.0) || !(b >= 0.0)) throw ValidationError("marcum_q: a and b must be non-negative");
}

} // namespace detail

inline double marcum_q(int M, double a, double b, const Tolerance& tol = {}) {
    detail::check_marcum_args(M, a, b);
    if (b == 0.0) return 1.0;
    if (std::isinf(b)) return 0.0;
    const double x = 0.5 * b * b;
    if (a == 0.0) return gamma_upper_reg(M, x, tol);
    const double lam = 0.5 * a * a;
    double q;
    if (b * b >= a * a + 2.0 * M)
        q = detail::marcum_q_upward(M, lam, x, tol);
    else
        q = 1.0 - detail::marcum_q_complement_downward(M, lam, x, tol);
    return std::clamp(q, 0.0, 1.0);
}

// 1 - Q_M(a,b), accurate when it is tiny
inline double marcum_q_complement(int M, double a, double b, const Tolerance& tol = {}) {
    detail::check_marcum_args(M, a, b);
    if (b == 0.0) return 0.0;
    if (std::isinf(b)) return 1.0;
    const double x = 0.5 * b * b;
    if (a == 0.0) return gamma_lower_reg(M, x, tol);
    const double lam = 0.5 * a * a;
    double p;
    if (b * b >= a * a + 2.0 * M)
        p = 1.0 - detail::marcum_q_upward(M, lam, x, tol);
    else
        p = detail::marcum_q_complement_downward(M, lam, x, tol);
    return std::clamp(p, 0.0, 1.0);
}

// ---- hypergeometric series ----

namespace detail {

inline bool nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

inline double hyp1f1_series(double a, double b, double x, const Tolerance& tol) {
    double t = 1.0, s = 1.0, c = 0.0;
    for (int n = 0; n < tol.max_terms; ++n) {
        t *= (a + n) * x / ((b + n) * (n + 1.0));
        // Neumaier step
        double u = s + t;
        c += std::fabs(s) >= std::fabs(t) ? (s - u) + t : (t - u) + s;
        s = u;
        if (t == 0.0) return s + c;
        if (std::fabs(t) < 1e-17 * std::fabs(s + c) && n > std::fabs(a)) return s + c;
    }
    nonconvergent("hyp1f1");
}

} // namespace detail

inline double hyp1f1(double a, double b, double x, const Tolerance& tol = {}) {
    if (detail::nonpositive_integer(b)) throw ValidationError("hyp1f1: b is a non-positive integer");
    if (x == 0.0) return 1.0;
    if (x < 0.0) return std::exp(x) * detail::hyp1f1_series(b - a, b, -x, tol); // Kummer
    return detail::hyp1f1_series(a, b, x, tol);
}

inline double hyp1f2(double a, double b1, double b2, double x, const Tolerance& tol = {}) {
    using detail::dd;
    if (detail::nonpositive_integer(b1) || detail::nonpositive_integer(b2))
        throw ValidationError("hyp1f2: b1 or b2 is a non-positive integer");
    if (x == 0.0) return 1.0;
    dd t{1.0, 0.0}, s{1.0, 0.0};
    double tmax = 1.0;
    int n = 0;
    for (;; ++n) {
        if (n >= tol.max_terms) detail::nonconvergent("hyp1f2");
        dd num = detail::two_prod(a + n, x);
        dd den = detail::two_prod(b1 + n, b2 + n) * (n + 1.0);
        t = t * num / den;
        s = s + t;
        tmax = std::max(tmax, std::fabs(t.hi));
        const double ratio = std::fabs((a + n + 1) * x / ((b1 + n + 1) * (b2 + n + 1) * (n + 2.0)));
        if (ratio < 0.5 && std::fabs(t.hi) < 1e-33 * std::fabs(s.hi)) break;
        if (t.hi == 0.0) break;
    }
    // rounding in double-double is ~2^-104 per operation on the largest term
    const double err = tmax * (n + 1.0) * 1e-31;
    if (err > tol.rel_tol * std::fabs(s.hi))
        throw NumericalError(NumericalErrorKind::nonconvergence,
                             "hyp1f2: cancellation exceeds the requested tolerance");
    return s.hi + s.lo;
}

// ---- fluid antenna correlation ----

namespace detail {

// (1/x) * int_0^x J0(t) dt, by composite Gauss-Legendre
inline double mean_j0(double x) {
    const GaussRule& g = gauss_legendre(20);
    const int panels = std::max(1, static_cast<int>(std::ceil(x / 1.5)));
    const double h = x / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h, half = 0.5 * h;
        double acc = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] * bessel_j0(mid + half * g.nodes[i]);
        total += acc * half;
    }
    return total / x;
}

inline double mu_squared_series(double w, const Tolerance& tol) {
    const double x = 2.0 * std::numbers::pi * w;
    const double f = hyp1f2(0.5, 1.0, 1.5, -std::numbers::pi * std::numbers::pi * w * w, tol);
    return 2.0 * (f - bessel_j1(x) / x);
}

inline double mu_squared_integral(double w) {
    const double x = 2.0 * std::numbers::pi * w;
    return 2.0 * (mean_j0(x) - bessel_j1(x) / x);
}

} // namespace detail

// Average squared spatial correlation of a fluid antenna of size w wavelengths.
// 1F2(1/2;1,3/2;-x^2/4) equals the mean of J0 over [0,x]; past w=6 that form
// is used because the alternating series cancels too much.
inline double mu_from_w(double w, const Tolerance& tol = {}) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("mu_from_w: w must be positive and finite");
    const double m2 = w <= 6.0 ? detail::mu_squared_series(w, tol) : detail::mu_squared_integral(w);
    return std::sqrt(std::clamp(m2, 0.0, 1.0));
}

} // namespace fama

#endif
