#ifndef FAMA_MONTECARLO_HPP
#define FAMA_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "strategy.hpp"

namespace fama {

enum class Strategy { wdt, wet };
enum class Objective { wdt, wet };
enum class Metric { wdt_sinr, wet_sinr, wdt_ehp, wet_ehp, idet_special, idet_general };
enum class Method { mc, exact, closed_form, simplified, product };
enum class IdetKind { special, general };

inline const char* to_string(Metric m) {
    switch (m) {
    case Metric::wdt_sinr: return "WDT_SINR";
    case Metric::wet_sinr: return "WET_SINR";
    case Metric::wdt_ehp: return "WDT_EHP";
    case Metric::wet_ehp: return "WET_EHP";
    case Metric::idet_special: return "IDET_SPECIAL";
    case Metric::idet_general: return "IDET_GENERAL";
    }
    return "?";
}

inline const char* to_string(Method m) {
    switch (m) {
    case Method::mc: return "MC";
    case Method::exact: return "EXACT";
    case Method::closed_form: return "CLOSED_FORM";
    case Method::simplified: return "SIMPLIFIED";
    case Method::product: return "PRODUCT";
    }
    return "?";
}

inline const char* to_string(Strategy s) { return s == Strategy::wdt ? "WDT" : "WET"; }

// Metric naming: the outage kind first, the port selection rule second.
inline Metric metric_for(Strategy s, Objective o) {
    if (s == Strategy::wdt) return o == Objective::wdt ? Metric::wdt_sinr : Metric::wet_sinr;
    return o == Objective::wdt ? Metric::wdt_ehp : Metric::wet_ehp;
}

struct OutageEstimate {
    double value = 0.0;
    double ci_half_width = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t count = 0; // outage events, MC only
    Metric metric = Metric::wdt_sinr;
    Method method = Method::mc;
};

inline OutageEstimate make_estimate(std::uint64_t count, std::uint64_t trials, Metric metric) {
    OutageEstimate e;
    e.count = count;
    e.trials = trials;
    e.metric = metric;
    e.method = Method::mc;
    e.value = trials ? static_cast<double>(count) / static_cast<double>(trials) : 0.0;
    e.ci_half_width = trials ? 1.96 * std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials)) : 0.0;
    return e;
}

struct McOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0; // 0: FAMA_WORKERS or hardware threads
    std::uint64_t block = 4096;
};

struct OutageCounts {
    std::uint64_t trials = 0;
    std::uint64_t wdt_sinr = 0, wet_sinr = 0, wdt_ehp = 0, wet_ehp = 0, idet_special = 0, idet_general = 0;

    OutageCounts& operator+=(const OutageCounts& o) {
        trials += o.trials;
        wdt_sinr += o.wdt_sinr;
        wet_sinr += o.wet_sinr;
        wdt_ehp += o.wdt_ehp;
        wet_ehp += o.wet_ehp;
        idet_special += o.idet_special;
        idet_general += o.idet_general;
        return *this;
    }

    std::uint64_t get(Metric m) const {
        switch (m) {
        case Metric::wdt_sinr: return wdt_sinr;
        case Metric::wet_sinr: return wet_sinr;
        case Metric::wdt_ehp: return wdt_ehp;
        case Metric::wet_ehp: return wet_ehp;
        case Metric::idet_special: return idet_special;
        case Metric::idet_general: return idet_general;
        }
        return 0;
    }

    OutageEstimate estimate(Metric m) const { return make_estimate(get(m), trials, m); }
};

namespace detail {

inline void check_trials(std::uint64_t trials) {
    if (trials < 1000) throw ValidationError("monte carlo: at least 1000 trials are required");
    if (trials > 0xFFFFFFFFull) throw ValidationError("monte carlo: trial count exceeds the 32-bit counter range");
}

// Trial t goes to block t / opts.block; every block is independent of the others.
template <class R, class F>
std::vector<R> run_trial_blocks(const McOptions& opts, F&& per_block) {
    const std::uint64_t bs = std::max<std::uint64_t>(1, opts.block);
    const std::size_t nblocks = static_cast<std::size_t>((opts.trials + bs - 1) / bs);
    return parallel_map<R>(nblocks, opts.workers, [&](std::size_t b) {
        const std::uint64_t lo = b * bs, hi = std::min(opts.trials, lo + bs);
        return per_block(lo, hi);
    });
}

struct ScenarioDraw {
    const SystemConfig& cfg;
    double mu;
    std::vector<double> phases; // empty for Rayleigh

    ScenarioDraw(const SystemConfig& c, std::uint64_t seed) : cfg(c), mu(c.correlation()) {
        if (cfg.rician_k > 0.0) phases = los_phases(cfg, 0, seed);
    }

    void draw(int ue, const TrialStream& rng, ChannelRealization& out) const {
        if (phases.empty())
            generate_rayleigh(cfg, mu, ue, rng, out);
        else
            generate_rician(cfg, mu, ue, phases, rng, out);
    }
};

// Threshold on X + Y that is equivalent to the EHP threshold for these statistics.
// Rician statistics are scaled by (k + 1) / Omega, hence the (k + 1) factor.
inline double sum_threshold(const SystemConfig& cfg, double mu, bool degenerate) {
    return (degenerate ? cfg.q_tilde() : cfg.q_hat(mu)) * (1.0 + cfg.rician_k);
}

} // namespace detail

// One pass that scores every outage metric on the same draws.
inline OutageCounts simulate_outages(const SystemConfig& cfg, const McOptions& opts) {
    cfg.validate();
    detail::check_trials(opts.trials);
    const detail::ScenarioDraw scen(cfg, opts.seed);
    const double gamma = cfg.sinr_threshold;
    auto blocks = detail::run_trial_blocks<OutageCounts>(opts, [&](std::uint64_t lo, std::uint64_t hi) {
        OutageCounts c;
        ChannelRealization real;
        PortStatistics st;
        for (std::uint64_t t = lo; t < hi; ++t) {
            scen.draw(0, TrialStream(opts.seed, t), real);
            port_statistics(real, scen.mu, st);
            const double qs = detail::sum_threshold(cfg, scen.mu, st.degenerate);
            const PortChoice ks = select_wdt_port(st);
            const PortChoice ke = select_wet_port(st);
            const bool wdt_sinr = ks.criterion_value < gamma;
            const bool wet_ehp = ke.criterion_value < qs;
            c.wdt_sinr += wdt_sinr;
            c.wet_ehp += wet_ehp;
            c.wet_sinr += (st.x[ks.port] + st.y[ks.port]) < qs;
            c.wdt_ehp += sir_ratio(st.x[ke.port], st.y[ke.port]) < gamma;
            bool all_fail = true;
            for (std::size_t k = 0; k < st.size() && all_fail; ++k)
                all_fail = sir_ratio(st.x[k], st.y[k]) < gamma && (st.x[k] + st.y[k]) < qs;
            c.idet_special += all_fail;
            c.idet_general += wdt_sinr || wet_ehp;
            ++c.trials;
        }
        return c;
    });
    OutageCounts total;
    for (const auto& b : blocks) total += b;
    return total;
}

inline OutageEstimate estimate_outage(const SystemConfig& cfg, Strategy s, Objective o, const McOptions& opts) {
    return simulate_outages(cfg, opts).estimate(metric_for(s, o));
}

inline OutageEstimate estimate_idet(const SystemConfig& cfg, const McOptions& opts, IdetKind kind) {
    return simulate_outages(cfg, opts).estimate(kind == IdetKind::special ? Metric::idet_special : Metric::idet_general);
}

// ---- multiplexing gains ----

struct GainReport {
    double m_wdt = 0.0, m_wet = 0.0, m_idet_special = 0.0, m_idet_general = 0.0;
};

inline GainReport multiplexing_gains(double eps_wdt_sinr, double eps_wet_ehp, double eps_special, double eps_general,
                                     int n_users) {
    return {n_users * (1.0 - eps_wdt_sinr), n_users * (1.0 - eps_wet_ehp), n_users * (1.0 - eps_special),
            n_users * (1.0 - eps_general)};
}

inline GainReport multiplexing_gains(const std::vector<OutageEstimate>& outages, int n_users) {
    auto find = [&](Metric m) {
        for (const auto& e : outages)
            if (e.metric == m) return e.value;
        throw ValidationError(std::string("multiplexing_gains: missing ") + to_string(m));
    };
    return multiplexing_gains(find(Metric::wdt_sinr), find(Metric::wet_ehp), find(Metric::idet_special),
                              find(Metric::idet_general), n_users);
}

// ---- energy efficiency ----

struct EnergyEfficiencyReport {
    double sum_rate = 0.0;    // bits/s, trial mean
    double harvested = 0.0;   // watts, trial mean
    double total_power = 0.0; // N P + P_C - harvested
    double ee = 0.0;          // sum_rate / total_power
    double ee_mean_of_ratios = 0.0;
    std::uint64_t nonpositive_trials = 0; // trials whose own power budget was not positive
    bool valid = true;
    Strategy strategy = Strategy::wdt;
};

// Produces the realization of one UE; the default draws from the configured fading model.
using ChannelSource = std::function<void(int ue, const TrialStream&, ChannelRealization&)>;

inline EnergyEfficiencyReport estimate_energy_efficiency(const SystemConfig& cfg, Strategy strategy,
                                                         const McOptions& opts, ChannelSource source = {}) {
    cfg.validate();
    detail::check_trials(opts.trials);
    const detail::ScenarioDraw scen(cfg, opts.seed);
    const double mu = scen.mu;
    const double budget = cfg.n_users * cfg.tx_power + cfg.fixed_power;
    std::vector<std::vector<double>> ue_phases;
    if (cfg.rician_k > 0.0)
        for (int i = 0; i < cfg.n_users; ++i) ue_phases.push_back(los_phases(cfg, i, opts.seed));
    struct Acc {
        NeumaierSum rate, harvest, ratio;
        std::uint64_t bad = 0;
    };
    auto blocks = detail::run_trial_blocks<Acc>(opts, [&](std::uint64_t lo, std::uint64_t hi) {
        Acc a;
        ChannelRealization real;
        PortStatistics st;
        for (std::uint64_t t = lo; t < hi; ++t) {
            const TrialStream rng(opts.seed, t);
            double r = 0.0, q = 0.0;
            for (int i = 0; i < cfg.n_users; ++i) {
                if (source) {
                    source(i, rng, real);
                } else if (!ue_phases.empty()) {
                    generate_rician(cfg, mu, i, ue_phases[i], rng, real);
                } else {
                    generate_rayleigh(cfg, mu, i, rng, real);
                }
                port_statistics(real, mu, st);
                const PortChoice c = strategy == Strategy::wdt ? select_wdt_port(st) : select_wet_port(st);
                const double sinr = sir_ratio(st.x[c.port], st.y[c.port]);
                r += cfg.bandwidth * std::log2(1.0 + sinr);
                q += ehp_at_port(real, c.port, cfg);
            }
            a.rate += r;
            a.harvest += q;
            const double tot = budget - q;
            if (tot > 0.0)
                a.ratio += r / tot;
            else
                ++a.bad;
        }
        return a;
    });
    NeumaierSum rate, harvest, ratio;
    std::uint64_t bad = 0;
    for (const auto& b : blocks) {
        rate += b.rate.value();
        harvest += b.harvest.value();
        ratio += b.ratio.value();
        bad += b.bad;
    }
    const double n = static_cast<double>(opts.trials);
    EnergyEfficiencyReport rep;
    rep.strategy = strategy;
    rep.sum_rate = rate.value() / n;
    rep.harvested = harvest.value() / n;
    rep.total_power = budget - rep.harvested;
    rep.nonpositive_trials = bad;
    rep.valid = rep.total_power > 0.0;
    rep.ee = rep.valid ? rep.sum_rate / rep.total_power : std::numeric_limits<double>::quiet_NaN();
    rep.ee_mean_of_ratios = bad < opts.trials ? ratio.value() / static_cast<double>(opts.trials - bad)
                                               : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

// ---- independence diagnostic ----

struct IndependenceReport {
    double rank_correlation = 0.0;
    double threshold = 0.0; // 3 / sqrt(trials)
    std::uint64_t trials = 0;
    bool passed = false;
};

namespace detail {

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j);
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    NeumaierSum sa, sb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
    }
    const double ma = sa.value() / n, mb = sb.value() / n;
    NeumaierSum sab, saa, sbb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab.value() / std::sqrt(saa.value() * sbb.value());
}

} // namespace detail

// Spearman correlation between X + Y and X / Y at a single port. The two are
// independent when mu = 0; other mu values give an informational reading.
inline IndependenceReport independence_diagnostic(const SystemConfig& cfg, const McOptions& opts) {
    SystemConfig one = cfg;
    one.n_ports = 1; // ports nest, so port 0 is the same draw for any K
    one.rician_k = 0.0;
    one.validate();
    detail::check_trials(opts.trials);
    const double mu = one.correlation();
    struct Chunk {
        std::vector<double> sum, ratio;
    };
    auto blocks = detail::run_trial_blocks<Chunk>(opts, [&](std::uint64_t lo, std::uint64_t hi) {
        Chunk c;
        ChannelRealization real;
        PortStatistics st;
        for (std::uint64_t t = lo; t < hi; ++t) {
            generate_rayleigh(one, mu, 0, TrialStream(opts.seed, t), real);
            port_statistics(real, mu, st);
            c.sum.push_back(st.x[0] + st.y[0]);
            c.ratio.push_back(sir_ratio(st.x[0], st.y[0]));
        }
        return c;
    });
    std::vector<double> s, r;
    for (auto& b : blocks) {
        s.insert(s.end(), b.sum.begin(), b.sum.end());
        r.insert(r.end(), b.ratio.begin(), b.ratio.end());
    }
    IndependenceReport rep;
    rep.trials = opts.trials;
    rep.rank_correlation = detail::pearson(detail::ranks(s), detail::ranks(r));
    rep.threshold = 3.0 / std::sqrt(static_cast<double>(opts.trials));
    rep.passed = std::fabs(rep.rank_correlation) < rep.threshold;
    return rep;
}

} // namespace fama

#endif
