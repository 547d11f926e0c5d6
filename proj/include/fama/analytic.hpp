#ifndef FAMA_ANALYTIC_HPP
#define FAMA_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace fama {

struct QuadratureSpec {
    int nodes_semiinfinite = 48;
    int nodes_finite = 64;
    double rel_tol_target = 1e-6;
    bool richardson_check = true;
    // cap on the node product of one evaluation, refinement pass included
    double max_node_product = 72.0 * 72.0 * 96.0 * 96.0;
    unsigned workers = 1;

    void validate() const {
        if (nodes_semiinfinite < 8 || nodes_finite < 8) throw ValidationError("quadrature: node counts must be >= 8");
        if (!(rel_tol_target > 0.0 && rel_tol_target < 1.0)) throw ValidationError("quadrature: bad rel_tol_target");
    }

    QuadratureSpec refined() const {
        QuadratureSpec q = *this;
        q.nodes_semiinfinite = (3 * nodes_semiinfinite + 1) / 2;
        q.nodes_finite = (3 * nodes_finite + 1) / 2;
        return q;
    }
};

// Everything an exact kernel needs; thresholds already normalized.
struct KernelContext {
    double mu = 0.5;
    double gamma_th = 2.0;
    double q_hat = 1.0;   // X + Y threshold
    double q_tilde = 1.0; // threshold on the raw sum of |g|^2
    int n_users = 2;
    int n_ports = 1;
    double rician_k = 0.0;

    static KernelContext from(const SystemConfig& cfg) {
        KernelContext c;
        c.mu = cfg.correlation();
        c.gamma_th = cfg.sinr_threshold;
        c.q_hat = cfg.q_hat(c.mu);
        c.q_tilde = cfg.q_tilde();
        c.n_users = cfg.n_users;
        c.n_ports = cfg.n_ports;
        c.rician_k = cfg.rician_k;
        return c;
    }

    double c2() const { return mu * mu / (1.0 - mu * mu); }
};

// An exact value with its refinement diagnostics.
struct QuadValue {
    double value = 0.0;
    double richardson_delta = 0.0; // |refined - base|, 0 if not run
    operator double() const { return value; }
};

namespace detail {

inline const Tolerance& kernel_tol() {
    static const Tolerance t{1e-12, 10000};
    return t;
}

inline void require_mu_open(const KernelContext& c, const char* fn) {
    if (!(c.mu > 0.0 && c.mu < 1.0)) throw ValidationError(std::string(fn) + ": mu must lie in (0, 1)");
    if (c.n_users < 2) throw ValidationError(std::string(fn) + ": n_users must be >= 2");
    if (c.n_ports < 1) throw ValidationError(std::string(fn) + ": n_ports must be >= 1");
    if (!(c.gamma_th >= 0.0) || !(c.q_hat >= 0.0)) throw ValidationError(std::string(fn) + ": negative threshold");
}

inline void cost_guard(const QuadratureSpec& q, double product, const char* fn) {
    const double p = q.richardson_check ? product * 1.5 * 1.5 * 1.5 * 1.5 : product;
    if (p > q.max_node_product)
        throw NumericalError(NumericalErrorKind::cost_guard,
                             std::string(fn) + ": node product exceeds the configured cap");
}

inline double finish(double v, const QuadratureSpec& q, const char* fn) {
    const double slack = 10.0 * q.rel_tol_target;
    if (!std::isfinite(v) || v < -slack || v > 1.0 + slack)
        throw NumericalError(NumericalErrorKind::nonconvergence,
                             std::string(fn) + ": quadrature result outside [0, 1]");
    return std::clamp(v, 0.0, 1.0);
}

// Evaluate at the base node counts and, if asked, again at 1.5x.
template <class F>
QuadValue with_refinement(const QuadratureSpec& q, const char* fn, F eval) {
    q.validate();
    QuadValue out;
    const double base = eval(q);
    if (!q.richardson_check) {
        out.value = finish(base, q, fn);
        return out;
    }
    const double fine = eval(q.refined());
    out.richardson_delta = std::fabs(fine - base);
    if (out.richardson_delta > 10.0 * q.rel_tol_target * std::max(std::fabs(fine), 1e-5))
        throw NumericalError(NumericalErrorKind::nonconvergence,
                             std::string(fn) + ": refinement changed the value beyond tolerance");
    out.value = finish(fine, q, fn);
    return out;
}

// p^k for p in [0, 1], through logs
inline double pow_prob(double p, double k) {
    if (k == 0.0) return 1.0;
    if (!(p > 0.0)) return 0.0;
    if (p >= 1.0) return 1.0;
    return std::exp(k * std::log(p));
}

// Outer axis for a central chi-square with 2m degrees of freedom: r = 2u, u ~ Gamma(m).
struct OuterAxis {
    std::vector<double> r, w;
};

inline OuterAxis chi2_axis(int n, int m) {
    const GaussRule& g = gauss_laguerre(n, m - 1.0);
    OuterAxis a;
    for (int i = 0; i < n; ++i)
        if (g.weights[i] > 1e-18) { // the dropped nodes carry negligible mass
            a.r.push_back(2.0 * g.nodes[i]);
            a.w.push_back(g.weights[i]);
        }
    return a;
}

} // namespace detail

// Noncentral chi-square with 2m degrees of freedom and noncentrality lambda.
class NcChi2 {
public:
    NcChi2(int m, double lambda) : m_(m), lam_(lambda) {}

    int half_dof() const { return m_; }
    double lambda() const { return lam_; }
    double mean() const { return 2.0 * m_ + lam_; }
    double sd() const { return std::sqrt(4.0 * m_ + 4.0 * lam_); }

    double log_pdf(double x) const {
        if (x < 0.0) return -std::numeric_limits<double>::infinity();
        if (x == 0.0) return m_ == 1 ? -std::log(2.0) - 0.5 * lam_ : -std::numeric_limits<double>::infinity();
        if (lam_ == 0.0)
            return (m_ - 1.0) * std::log(x) - 0.5 * x - m_ * std::numbers::ln2 - detail::log_gamma(m_);
        return -std::numbers::ln2 - 0.5 * (x + lam_) + 0.5 * (m_ - 1.0) * std::log(x / lam_) +
               log_bessel_i(m_ - 1, std::sqrt(lam_ * x), detail::kernel_tol());
    }
    double pdf(double x) const { return std::exp(log_pdf(x)); }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        return marcum_q_complement(m_, std::sqrt(lam_), std::sqrt(x), detail::kernel_tol());
    }
    double sf(double x) const {
        if (x <= 0.0) return 1.0;
        return marcum_q(m_, std::sqrt(lam_), std::sqrt(x), detail::kernel_tol());
    }

    // interval outside of which each tail holds less than eps
    std::pair<double, double> window(double eps = 1e-15) const {
        const double mu = mean();
        double hi = mu + 10.0 * sd();
        double below = mu;
        while (sf(hi) > eps) {
            below = hi;
            hi *= 2.0;
        }
        for (int i = 0; i < 44; ++i) {
            const double mid = 0.5 * (below + hi);
            if (sf(mid) > eps)
                below = mid;
            else
                hi = mid;
        }
        double lo = 0.0, above = mu;
        if (cdf(mu) > eps && cdf(1e-300) < eps) {
            for (int i = 0; i < 44; ++i) {
                const double mid = 0.5 * (lo + above);
                if (cdf(mid) < eps)
                    lo = mid;
                else
                    above = mid;
            }
        }
        return {lo, hi};
    }

private:
    int m_;
    double lam_;
};

// ---- WDT outage, max-SINR port ----

namespace detail {

// P(X / Y < g) for X ~ ncx2(2, c2 r), Y ~ ncx2(2(N-1), c2 rt), in closed form.
inline double ratio_cdf(int N, double c2, double g, double r, double rt) {
    if (g <= 0.0) return 0.0;
    if (std::isinf(g)) return 1.0;
    const double gp1 = g + 1.0;
    const double a = std::sqrt(c2 * g * rt / gp1), b = std::sqrt(c2 * r / gp1);
    const double q = marcum_q(N - 1, a, b, kernel_tol());
    const double z = c2 * std::sqrt(g * r * rt) / gp1;
    const double lead = -c2 * (g * rt + r) / (2.0 * gp1) - (N - 1) * std::log(gp1);
    const double lrr = std::log(r / rt), lg = std::log(g), lgp1 = std::log(gp1);
    double s = 0.0;
    for (int k = 0; k <= N - 2; ++k)
        for (int j = 0; j <= N - k - 2; ++j) {
            const double lb = z > 0.0 ? log_bessel_i(j + k, z, kernel_tol())
                                      : (j + k == 0 ? 0.0 : -std::numeric_limits<double>::infinity());
            const double lt = std::log(pochhammer(N - j - k - 1.0, j)) - log_gamma(j + 1.0) +
                              0.5 * (j + k) * lrr + k * lgp1 + 0.5 * (j - k) * lg + lb + lead;
            s += std::exp(lt);
        }
    return std::clamp(q - s, 0.0, 1.0);
}

} // namespace detail

inline QuadValue wdt_sinr_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "wdt_sinr_exact");
    if (c.gamma_th == 0.0) return {};
    detail::cost_guard(quad, double(quad.nodes_semiinfinite) * quad.nodes_semiinfinite, "wdt_sinr_exact");
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports;
    return detail::with_refinement(quad, "wdt_sinr_exact", [&](const QuadratureSpec& q) {
        const auto ar = detail::chi2_axis(q.nodes_semiinfinite, 1);
        const auto at = detail::chi2_axis(q.nodes_semiinfinite, N - 1);
        auto rows = parallel_map<double>(ar.r.size(), q.workers, [&](std::size_t i) {
            NeumaierSum acc;
            for (std::size_t j = 0; j < at.r.size(); ++j)
                acc += at.w[j] * detail::pow_prob(detail::ratio_cdf(N, c2, c.gamma_th, ar.r[i], at.r[j]), K);
            return ar.w[i] * acc.value();
        });
        NeumaierSum tot;
        for (double v : rows) tot += v;
        return tot.value();
    });
}

struct SinrApprox {
    double full = 0.0;   // with the full C term
    double simplified = 0.0; // C replaced by ((1 - mu^2)/(gamma + 1))^{N-1}
};

inline SinrApprox wdt_sinr_approx(const KernelContext& c) {
    const int N = c.n_users;
    const double m2 = c.mu * c.mu, g = c.gamma_th, K = c.n_ports;
    double C = 0.0;
    for (int k = 0; k <= N - 2; ++k)
        for (int j = 0; j <= N - k - 2; ++j)
            C += std::pow(g, j) * std::pow(g + 1.0, k + 1) * pochhammer(N - j - k - 1.0, j) /
                 std::exp(detail::log_gamma(j + 1.0)) * std::pow(m2, j + k) /
                 std::pow((1.0 - m2) * g + 1.0, j + k + 1);
    C *= std::pow((2.0 * g * (1.0 - m2) + 1.0) / (2.0 * g * g + (3.0 - m2) * g + 1.0), N - 1) * (1.0 - m2);
    const double first = K * std::pow(m2 / (g + 1.0), N - 1);
    SinrApprox a;
    a.full = std::max(0.0, 1.0 - first - K * C);
    a.simplified = std::max(0.0, 1.0 - first - K * std::pow((1.0 - m2) / (g + 1.0), N - 1));
    return a;
}

// Lower bound of the simplified form, with C bounded by (1 - mu^2)/gamma.
inline double wdt_sinr_lower_bound(const KernelContext& c) {
    const int N = c.n_users;
    const double m2 = c.mu * c.mu, g = c.gamma_th, K = c.n_ports;
    return std::max(0.0, 1.0 - K * std::pow(m2 / (g + 1.0), N - 1) - K * std::pow((1.0 - m2) / g, N - 1));
}

// ---- WET outage, max-EHP port ----

inline QuadValue wet_ehp_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "wet_ehp_exact");
    if (c.q_hat == 0.0) return {};
    if (std::isinf(c.q_hat)) return {1.0, 0.0};
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports, sq = std::sqrt(c.q_hat);
    return detail::with_refinement(quad, "wet_ehp_exact", [&](const QuadratureSpec& q) {
        const auto av = detail::chi2_axis(q.nodes_semiinfinite, N);
        NeumaierSum acc;
        for (std::size_t i = 0; i < av.r.size(); ++i)
            acc += av.w[i] *
                   detail::pow_prob(marcum_q_complement(N, std::sqrt(c2 * av.r[i]), sq, detail::kernel_tol()), K);
        return acc.value();
    });
}

inline double wet_ehp_approx(const KernelContext& c) {
    const int N = c.n_users;
    const double m2 = c.mu * c.mu, K = c.n_ports, h = 0.5 * c.q_hat;
    if (c.q_hat == 0.0) return 0.0;
    double s = 0.0;
    for (int l = 0; l < N; ++l) s += std::pow(1.0 - m2, l) * hyp1f1(l + 1.0, N + 1.0, m2 * h);
    const double third = m2 * std::exp(N * std::log(h) - h - detail::log_gamma(N + 1.0)) * s;
    return std::max(0.0, 1.0 - K * gamma_upper_reg(N, h) - K * third);
}

// ---- large-W closed forms for the cross-strategy outages ----

inline double wet_sinr_approx(const KernelContext& c) {
    if (c.q_tilde == 0.0) return 0.0;
    if (std::isinf(c.q_tilde)) return 1.0;
    return gamma_lower_reg(c.n_users, 0.5 * c.q_tilde);
}

inline double wdt_ehp_approx(const KernelContext& c) {
    return 1.0 - std::pow(1.0 / (c.gamma_th + 1.0), c.n_users - 1);
}

// ---- WET outage, max-SINR port ----

namespace detail {

struct ConditionalCache {
    std::vector<NcChi2> xs, ys;
    std::vector<std::pair<double, double>> wxs, wys;

    ConditionalCache(const OuterAxis& a1, const OuterAxis& a2, int N, double c2, unsigned workers) {
        for (double r : a1.r) xs.emplace_back(1, c2 * r);
        for (double r : a2.r) ys.emplace_back(N - 1, c2 * r);
        wxs = parallel_map<std::pair<double, double>>(xs.size(), workers, [&](std::size_t i) { return xs[i].window(); });
        wys = parallel_map<std::pair<double, double>>(ys.size(), workers, [&](std::size_t i) { return ys[i].window(); });
    }
};

template <class F>
double integrate_on(int n, double a, double b, F f) {
    if (!(b > a)) return 0.0;
    const GaussRule& g = gauss_legendre(n);
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    NeumaierSum s;
    for (int i = 0; i < n; ++i) s += g.weights[i] * f(m + h * g.nodes[i]);
    return h * s.value();
}

} // namespace detail

inline QuadValue wet_sinr_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "wet_sinr_exact");
    if (c.q_hat == 0.0) return {};
    if (c.n_ports == 1) {
        // a single port is selected by both rules
        KernelContext one = c;
        return wet_ehp_exact(one, quad);
    }
    const double ns = quad.nodes_semiinfinite, nf = quad.nodes_finite;
    detail::cost_guard(quad, ns * ns * nf * nf, "wet_sinr_exact");
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports, Qh = c.q_hat;
    return detail::with_refinement(quad, "wet_sinr_exact", [&](const QuadratureSpec& q) {
        const int n = q.nodes_finite;
        const auto a1 = detail::chi2_axis(q.nodes_semiinfinite, 1);
        const auto a2 = detail::chi2_axis(q.nodes_semiinfinite, N - 1);
        const detail::ConditionalCache cache(a1, a2, N, c2, q.workers);
        // z = s / (1 - s) maps the ratio axis onto (0, 1)
        const GaussRule zs = legendre_on(n, 0.0, 1.0);
        auto rows = parallel_map<double>(a1.r.size(), q.workers, [&](std::size_t i) {
            const NcChi2& X = cache.xs[i];
            const auto [lx, ux] = cache.wxs[i];
            const double sa = std::sqrt(X.lambda());
            NeumaierSum row;
            for (std::size_t j = 0; j < a2.r.size(); ++j) {
                const NcChi2& Y = cache.ys[j];
                const auto [ly, uy] = cache.wys[j];
                NeumaierSum zsum;
                for (int t = 0; t < n; ++t) {
                    const double s = zs.nodes[t], z = s / (1.0 - s), jac = 1.0 / ((1.0 - s) * (1.0 - s));
                    const double F = detail::ratio_cdf(N, c2, z, a1.r[i], a2.r[j]);
                    const double lfr = K > 2 ? (K - 2.0) * std::log(F) : 0.0;
                    if (!std::isfinite(lfr)) continue;
                    // density of X / Y at z
                    const double fr = detail::integrate_on(n, std::max(ly, lx / z), std::min(uy, ux / z),
                                                           [&](double y) { return y * X.pdf(z * y) * Y.pdf(y); });
                    if (fr <= 0.0) continue;
                    // P(X > z Y, X + Y < Qh)
                    const double g = detail::integrate_on(n, ly, std::min(uy, Qh / (1.0 + z)), [&](double y) {
                        const double d = marcum_q(1, sa, std::sqrt(z * y), detail::kernel_tol()) -
                                         marcum_q(1, sa, std::sqrt(std::max(0.0, Qh - y)), detail::kernel_tol());
                        return Y.pdf(y) * std::max(0.0, d);
                    });
                    zsum += zs.weights[t] * jac * (K - 1.0) * std::exp(lfr) * fr * g;
                }
                row += a2.w[j] * zsum.value();
            }
            return a1.w[i] * row.value();
        });
        NeumaierSum tot;
        for (double v : rows) tot += v;
        return K * tot.value();
    });
}

// ---- WDT outage, max-EHP port ----

inline QuadValue wdt_ehp_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "wdt_ehp_exact");
    if (c.gamma_th == 0.0) return {};
    const double ns = quad.nodes_semiinfinite, nf = quad.nodes_finite;
    detail::cost_guard(quad, ns * ns * nf * nf, "wdt_ehp_exact");
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports, g = c.gamma_th;
    return detail::with_refinement(quad, "wdt_ehp_exact", [&](const QuadratureSpec& q) {
        const int n = q.nodes_finite;
        const auto a1 = detail::chi2_axis(q.nodes_semiinfinite, 1);
        const auto a2 = detail::chi2_axis(q.nodes_semiinfinite, N - 1);
        const detail::ConditionalCache cache(a1, a2, N, c2, q.workers);
        auto rows = parallel_map<double>(a1.r.size(), q.workers, [&](std::size_t i) {
            const NcChi2& X = cache.xs[i];
            const auto [lx, ux] = cache.wxs[i];
            NeumaierSum row;
            for (std::size_t j = 0; j < a2.r.size(); ++j) {
                const NcChi2& Y = cache.ys[j];
                const auto [ly, uy] = cache.wys[j];
                const double sl = std::sqrt(X.lambda() + Y.lambda());
                const double v = detail::integrate_on(n, std::max(ly, lx / g), uy, [&](double y) {
                    const double inner = detail::integrate_on(n, lx, std::min(ux, g * y), [&](double t) {
                        const double cdf_sum = marcum_q_complement(N, sl, std::sqrt(t + y), detail::kernel_tol());
                        return X.pdf(t) * detail::pow_prob(cdf_sum, K - 1.0);
                    });
                    return Y.pdf(y) * inner;
                });
                row += a2.w[j] * v;
            }
            return a1.w[i] * row.value();
        });
        NeumaierSum tot;
        for (double v : rows) tot += v;
        return K * tot.value();
    });
}

// ---- IDET ----

inline QuadValue idet_special_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "idet_special_exact");
    if (!(c.gamma_th > 0.0)) throw ValidationError("idet_special_exact: gamma_th must be positive");
    if (c.q_hat == 0.0) return {};
    const double ns = quad.nodes_semiinfinite, nf = quad.nodes_finite;
    detail::cost_guard(quad, ns * ns * nf, "idet_special_exact");
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports, g = c.gamma_th;
    const double top = std::isinf(g) ? c.q_hat : c.q_hat / (1.0 + 1.0 / g);
    return detail::with_refinement(quad, "idet_special_exact", [&](const QuadratureSpec& q) {
        const int n = q.nodes_finite;
        const auto a1 = detail::chi2_axis(q.nodes_semiinfinite, 1);
        const auto a2 = detail::chi2_axis(q.nodes_semiinfinite, N - 1);
        const detail::ConditionalCache cache(a1, a2, N, c2, q.workers);
        const double floor_p = q.rel_tol_target * 1e-6;
        auto rows = parallel_map<double>(a1.r.size(), q.workers, [&](std::size_t i) {
            const NcChi2& X = cache.xs[i];
            const auto [lx, ux] = cache.wxs[i];
            NeumaierSum row;
            for (std::size_t j = 0; j < a2.r.size(); ++j) {
                const double sl2 = std::sqrt(cache.ys[j].lambda());
                // P(X/Y < g, X + Y < Qh) for one port
                double p = detail::integrate_on(n, lx, std::min(ux, top), [&](double x) {
                    const double yl = std::isinf(g) ? 0.0 : x / g;
                    const double d = marcum_q(N - 1, sl2, std::sqrt(yl), detail::kernel_tol()) -
                                     marcum_q(N - 1, sl2, std::sqrt(std::max(0.0, c.q_hat - x)), detail::kernel_tol());
                    return X.pdf(x) * std::max(0.0, d);
                });
                if (p < floor_p) p = 0.0;
                row += a2.w[j] * detail::pow_prob(std::min(p, 1.0), K);
            }
            return a1.w[i] * row.value();
        });
        NeumaierSum tot;
        for (double v : rows) tot += v;
        return tot.value();
    });
}

enum class IdetRegime { wdt_dominated, wet_dominated, mixed };

inline const char* to_string(IdetRegime r) {
    switch (r) {
    case IdetRegime::wdt_dominated: return "wdt_dominated";
    case IdetRegime::wet_dominated: return "wet_dominated";
    case IdetRegime::mixed: return "mixed";
    }
    return "?";
}

struct SpecialApprox {
    double value = 0.0;
    IdetRegime regime = IdetRegime::mixed;
};

// Product form. When one factor is close to one the special outage follows
// the other factor: small N drives the WET outage up, large N the WDT outage.
inline SpecialApprox idet_special_approx(double eps_wdt, double eps_wet, double near_one = 0.85) {
    SpecialApprox a;
    a.value = eps_wdt * eps_wet;
    if (eps_wet >= near_one && eps_wet >= eps_wdt)
        a.regime = IdetRegime::wdt_dominated;
    else if (eps_wdt >= near_one)
        a.regime = IdetRegime::wet_dominated;
    return a;
}

inline double idet_general(double wdt, double wet, double special, double tol = 1e-9) {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(wdt) || !in01(wet) || !in01(special)) throw ValidationError("idet_general: inputs must lie in [0, 1]");
    if (special > std::min(wdt, wet) + tol)
        throw NumericalError(NumericalErrorKind::inconsistency,
                             "idet_general: special outage exceeds one of its component outages");
    return std::clamp(wdt + wet - special, 0.0, 1.0);
}

// ---- Rician channels ----
//
// The LoS term shifts the common components: per antenna the noncentrality of
// x0^2 + y0^2 is 2 kappa / mu^2, consistent with the generator in channel.hpp.

namespace detail {

struct WindowAxis {
    std::vector<double> v, w;
};

inline WindowAxis noncentral_axis(int n, int m, double lam) {
    const NcChi2 d(m, lam);
    const auto [lo, hi] = d.window(1e-14);
    const GaussRule g = legendre_on(n, lo, hi);
    WindowAxis a;
    for (int i = 0; i < n; ++i) {
        const double w = g.weights[i] * d.pdf(g.nodes[i]);
        if (w > 0.0) {
            a.v.push_back(g.nodes[i]);
            a.w.push_back(w);
        }
    }
    return a;
}

} // namespace detail

inline double rician_noncentrality(const KernelContext& c) { return 2.0 * c.rician_k / (c.mu * c.mu); }

// The normalized Rician statistics carry mean power (k + 1) times the Rayleigh
// ones, so the same EHP threshold sits at (k + 1) q_hat.
inline double rician_sum_threshold(const KernelContext& c) { return (1.0 + c.rician_k) * c.q_hat; }

inline QuadValue rician_wdt_sinr_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "rician_wdt_sinr_exact");
    if (!(c.rician_k >= 0.0)) throw ValidationError("rician_wdt_sinr_exact: rician_k must be non-negative");
    if (c.rician_k == 0.0) return wdt_sinr_exact(c, quad);
    if (c.gamma_th == 0.0) return {};
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports, lam = rician_noncentrality(c);
    return detail::with_refinement(quad, "rician_wdt_sinr_exact", [&](const QuadratureSpec& q) {
        const auto a1 = detail::noncentral_axis(q.nodes_finite, 1, lam);
        const auto a2 = detail::noncentral_axis(q.nodes_finite, N - 1, (N - 1) * lam);
        auto rows = parallel_map<double>(a1.v.size(), q.workers, [&](std::size_t i) {
            NeumaierSum acc;
            for (std::size_t j = 0; j < a2.v.size(); ++j)
                acc += a2.w[j] * detail::pow_prob(detail::ratio_cdf(N, c2, c.gamma_th, a1.v[i], a2.v[j]), K);
            return a1.w[i] * acc.value();
        });
        NeumaierSum tot;
        for (double v : rows) tot += v;
        return tot.value();
    });
}

inline QuadValue rician_wet_ehp_exact(const KernelContext& c, const QuadratureSpec& quad = {}) {
    detail::require_mu_open(c, "rician_wet_ehp_exact");
    if (!(c.rician_k >= 0.0)) throw ValidationError("rician_wet_ehp_exact: rician_k must be non-negative");
    if (c.rician_k == 0.0) return wet_ehp_exact(c, quad);
    if (c.q_hat == 0.0) return {};
    const int N = c.n_users;
    const double c2 = c.c2(), K = c.n_ports, sq = std::sqrt(rician_sum_threshold(c));
    return detail::with_refinement(quad, "rician_wet_ehp_exact", [&](const QuadratureSpec& q) {
        const auto av = detail::noncentral_axis(q.nodes_finite, N, N * rician_noncentrality(c));
        NeumaierSum acc;
        for (std::size_t i = 0; i < av.v.size(); ++i)
            acc += av.w[i] *
                   detail::pow_prob(marcum_q_complement(N, std::sqrt(c2 * av.v[i]), sq, detail::kernel_tol()), K);
        return acc.value();
    });
}

} // namespace fama

#endif
