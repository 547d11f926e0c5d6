#ifndef FAMA_SWEEP_HPP
#define FAMA_SWEEP_HPP

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "montecarlo.hpp"

namespace fama {

class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& source, int line, const std::string& key, const std::string& msg)
        : ValidationError(format(source, line, key, msg)), line_(line), key_(key) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    static std::string format(const std::string& source, int line, const std::string& key, const std::string& msg) {
        std::string s = source;
        if (line > 0) s += ":" + std::to_string(line);
        if (!key.empty()) s += ": " + key;
        return s + ": " + msg;
    }
    int line_;
    std::string key_;
};

enum class OutputFormat { csv, json };

struct MetricRequest {
    Metric metric = Metric::wdt_sinr;
    Method method = Method::mc;
};

struct SweepSpec {
    SystemConfig base;
    std::map<std::string, std::string> base_tokens; // scenario keys exactly as written
    std::string axis;                               // empty for a single cell
    std::vector<std::string> values;                // axis values exactly as written
    std::vector<MetricRequest> metrics;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    OutputFormat format = OutputFormat::csv;
    std::string output_path;
    QuadratureSpec quad;
    bool timing = false;
    bool common_random_numbers = true;

    void validate() const;
};

struct SweepRow {
    std::string axis_value;
    Metric metric = Metric::wdt_sinr;
    Method method = Method::mc;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> ci;
    std::uint64_t trials = 0;
    std::optional<double> seconds;
    std::optional<double> quad_delta;
    std::string error; // empty when the cell succeeded
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
    bool any_numerical_failure = false;
    bool any_validation_failure = false;
};

// ---- token parsing ----

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

// number followed by an optional unit suffix
inline std::pair<double, std::string> number_unit(const std::string& tok) {
    const std::string t = trim(tok);
    double v = 0.0;
    const char* b = t.data();
    const char* e = t.data() + t.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p == b) throw ValidationError("expected a number, got '" + t + "'");
    return {v, trim(std::string(p, e))};
}

inline double unit_scale(const std::string& unit, const std::map<std::string, double>& table, const std::string& tok) {
    auto it = table.find(unit);
    if (it == table.end()) throw ValidationError("unknown unit in '" + tok + "'");
    return it->second;
}

inline long long parse_integer(const std::string& tok) {
    const std::string t = trim(tok);
    long long v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) throw ValidationError("expected an integer, got '" + t + "'");
    return v;
}

inline double parse_power(const std::string& tok) {
    auto [v, u] = number_unit(tok);
    if (u == "dBm") return std::pow(10.0, (v - 30.0) / 10.0);
    if (u == "dBW") return std::pow(10.0, v / 10.0);
    return v * unit_scale(u, {{"", 1.0}, {"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}}, tok);
}

inline double parse_ratio(const std::string& tok) {
    auto [v, u] = number_unit(tok);
    if (u == "dB") return db_to_linear(v);
    if (!u.empty()) throw ValidationError("unknown unit in '" + tok + "'");
    return v;
}

inline double parse_plain(const std::string& tok) {
    auto [v, u] = number_unit(tok);
    if (!u.empty()) throw ValidationError("unexpected unit in '" + tok + "'");
    return v;
}

} // namespace detail

inline const std::vector<std::string>& scenario_keys() {
    static const std::vector<std::string> keys = {
        "n_users",      "n_ports",        "fa_size",        "mu",       "ps_ratio",  "tx_power",   "distance",
        "pathloss_exp", "sinr_threshold", "ehp_threshold", "rician_k", "bandwidth", "fixed_power"};
    return keys;
}

inline const std::vector<std::string>& sweepable_keys() {
    static const std::vector<std::string> keys = {"n_users",       "n_ports",  "fa_size", "sinr_threshold",
                                                  "ehp_threshold", "rician_k", "ps_ratio"};
    return keys;
}

// Sets one scenario field from a token such as "3dB", "10mW" or "5W" (wavelengths for fa_size).
inline void apply_field(SystemConfig& c, const std::string& key, const std::string& tok) {
    using namespace detail;
    if (key == "n_users") {
        c.n_users = static_cast<int>(parse_integer(tok));
    } else if (key == "n_ports") {
        c.n_ports = static_cast<int>(parse_integer(tok));
    } else if (key == "fa_size") {
        auto [v, u] = number_unit(tok);
        if (!(u.empty() || u == "W" || u == "lambda")) throw ValidationError("unknown unit in '" + tok + "'");
        c.fa_size = v;
    } else if (key == "mu") {
        c.mu = parse_plain(tok);
    } else if (key == "ps_ratio") {
        c.ps_ratio = parse_plain(tok);
    } else if (key == "tx_power") {
        c.tx_power = parse_power(tok);
    } else if (key == "distance") {
        auto [v, u] = number_unit(tok);
        c.distance = v * unit_scale(u, {{"", 1.0}, {"m", 1.0}, {"km", 1e3}}, tok);
    } else if (key == "pathloss_exp") {
        c.pathloss_exp = parse_plain(tok);
    } else if (key == "sinr_threshold") {
        c.sinr_threshold = parse_ratio(tok);
    } else if (key == "ehp_threshold") {
        c.ehp_threshold = parse_power(tok);
    } else if (key == "rician_k") {
        c.rician_k = parse_ratio(tok);
    } else if (key == "bandwidth") {
        auto [v, u] = number_unit(tok);
        c.bandwidth = v * unit_scale(u, {{"", 1.0}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}, tok);
    } else if (key == "fixed_power") {
        c.fixed_power = parse_power(tok);
    } else {
        throw ValidationError("unknown scenario key");
    }
}

inline Metric parse_metric(const std::string& s) {
    for (Metric m : {Metric::wdt_sinr, Metric::wet_sinr, Metric::wdt_ehp, Metric::wet_ehp, Metric::idet_special,
                     Metric::idet_general})
        if (s == to_string(m)) return m;
    throw ValidationError("unknown metric '" + s + "'");
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::mc, Method::exact, Method::closed_form, Method::simplified, Method::product})
        if (s == to_string(m)) return m;
    throw ValidationError("unknown method '" + s + "'");
}

inline MetricRequest parse_metric_request(const std::string& tok) {
    const auto parts = detail::split(tok, ':');
    if (parts.size() != 2) throw ValidationError("metric requests look like WDT_SINR:MC, got '" + tok + "'");
    return {parse_metric(parts[0]), parse_method(parts[1])};
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ValidationError("expected a boolean, got '" + s + "'");
}

// "2,3,4" or an integer range "2..8"
inline std::vector<std::string> expand_values(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& part : detail::split(s, ',')) {
        if (part.empty()) continue;
        const auto dots = part.find("..");
        if (dots != std::string::npos) {
            const long long lo = detail::parse_integer(part.substr(0, dots));
            const long long hi = detail::parse_integer(part.substr(dots + 2));
            if (hi < lo) throw ValidationError("empty range '" + part + "'");
            for (long long v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
        } else {
            out.push_back(part);
        }
    }
    return out;
}

inline void SweepSpec::validate() const {
    base.validate();
    if (metrics.empty()) throw ValidationError("no metrics requested");
    if (trials < 1000) throw ValidationError("trials must be at least 1000");
    quad.validate();
    if (!axis.empty()) {
        bool ok = false;
        for (const auto& k : sweepable_keys()) ok = ok || k == axis;
        if (!ok) throw ValidationError("axis '" + axis + "' cannot be swept");
        if (values.empty()) throw ValidationError("sweep.values is empty");
        for (const auto& v : values) {
            SystemConfig c = base;
            apply_field(c, axis, v);
            c.validate();
        }
    }
}

// Flat key = value text; '#' starts a comment. Scenario keys set the base
// configuration; sweep.*, run.* and quad.* keys describe the run.
inline SweepSpec parse_config(std::istream& in, const std::string& source = "<config>") {
    SweepSpec spec;
    std::string line;
    int lineno = 0;
    bool have_values = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, lineno, "", "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (val.empty()) throw ConfigError(source, lineno, key, "missing value");
        try {
            bool scenario = false;
            for (const auto& k : scenario_keys()) scenario = scenario || k == key;
            if (scenario) {
                apply_field(spec.base, key, val);
                spec.base_tokens[key] = val;
            } else if (key == "sweep.axis") {
                spec.axis = val;
            } else if (key == "sweep.values") {
                auto v = expand_values(val);
                spec.values.insert(spec.values.end(), v.begin(), v.end());
                have_values = true;
            } else if (key == "sweep.metric" || key == "sweep.metrics") {
                for (const auto& t : detail::split(val, ','))
                    if (!t.empty()) spec.metrics.push_back(parse_metric_request(t));
            } else if (key == "sweep.timing") {
                spec.timing = parse_bool(val);
            } else if (key == "sweep.common_random_numbers") {
                spec.common_random_numbers = parse_bool(val);
            } else if (key == "run.trials") {
                spec.trials = static_cast<std::uint64_t>(detail::parse_integer(val));
            } else if (key == "run.seed") {
                spec.seed = static_cast<std::uint64_t>(detail::parse_integer(val));
            } else if (key == "run.workers") {
                spec.workers = static_cast<unsigned>(detail::parse_integer(val));
            } else if (key == "run.format") {
                if (val == "csv")
                    spec.format = OutputFormat::csv;
                else if (val == "json")
                    spec.format = OutputFormat::json;
                else
                    throw ValidationError("format must be csv or json");
            } else if (key == "run.out") {
                spec.output_path = val;
            } else if (key == "quad.nodes_semiinfinite") {
                spec.quad.nodes_semiinfinite = static_cast<int>(detail::parse_integer(val));
            } else if (key == "quad.nodes_finite") {
                spec.quad.nodes_finite = static_cast<int>(detail::parse_integer(val));
            } else if (key == "quad.rel_tol") {
                spec.quad.rel_tol_target = detail::parse_plain(val);
            } else if (key == "quad.richardson") {
                spec.quad.richardson_check = parse_bool(val);
            } else if (key == "quad.max_node_product") {
                spec.quad.max_node_product = detail::parse_plain(val);
            } else {
                throw ValidationError("unknown key");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(source, lineno, key, e.what());
        }
    }
    if (!spec.axis.empty() && !have_values) throw ConfigError(source, 0, "sweep.values", "missing for a sweep");
    if (spec.axis.empty() && have_values) throw ConfigError(source, 0, "sweep.axis", "values given without an axis");
    return spec;
}

inline SweepSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "", "cannot open file");
    return parse_config(in, path);
}

// ---- evaluation ----

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Evaluates every requested (metric, method) of one scenario, sharing work between them.
class CellEvaluator {
public:
    CellEvaluator(const SystemConfig& cfg, const QuadratureSpec& quad) : cfg_(cfg), quad_(quad) {}

    QuadValue exact(Metric m) {
        auto it = exact_.find(m);
        if (it != exact_.end()) return it->second;
        const QuadValue v = compute_exact(m);
        exact_[m] = v;
        return v;
    }

    double closed(Metric m, Method method) {
        const KernelContext c = ctx();
        switch (m) {
        case Metric::wdt_sinr: {
            const auto a = wdt_sinr_approx(c);
            if (method == Method::closed_form) return a.full;
            if (method == Method::simplified) return a.simplified;
            break;
        }
        case Metric::wet_sinr:
            if (method == Method::closed_form) return wet_sinr_approx(c);
            break;
        case Metric::wdt_ehp:
            if (method == Method::closed_form) return wdt_ehp_approx(c);
            break;
        case Metric::wet_ehp:
            if (method == Method::closed_form) return wet_ehp_approx(c);
            break;
        case Metric::idet_special:
            if (method == Method::closed_form) return wdt_sinr_approx(c).full * wet_ehp_approx(c);
            if (method == Method::product) return idet_special_approx(exact(Metric::wdt_sinr), exact(Metric::wet_ehp)).value;
            break;
        case Metric::idet_general:
            if (method == Method::closed_form) {
                const double a = wdt_sinr_approx(c).full, b = wet_ehp_approx(c);
                return idet_general(a, b, a * b);
            }
            break;
        }
        throw ValidationError(std::string("method ") + to_string(method) + " is not available for " + to_string(m));
    }

private:
    KernelContext ctx() {
        if (!ctx_) ctx_ = KernelContext::from(cfg_);
        return *ctx_;
    }

    QuadValue compute_exact(Metric m) {
        const KernelContext c = ctx();
        if (cfg_.rician_k > 0.0) {
            if (m == Metric::wdt_sinr) return rician_wdt_sinr_exact(c, quad_);
            if (m == Metric::wet_ehp) return rician_wet_ehp_exact(c, quad_);
            throw ValidationError(std::string("no exact Rician form for ") + to_string(m));
        }
        switch (m) {
        case Metric::wdt_sinr: return wdt_sinr_exact(c, quad_);
        case Metric::wet_sinr: return wet_sinr_exact(c, quad_);
        case Metric::wdt_ehp: return wdt_ehp_exact(c, quad_);
        case Metric::wet_ehp: return wet_ehp_exact(c, quad_);
        case Metric::idet_special: return idet_special_exact(c, quad_);
        case Metric::idet_general: {
            const QuadValue a = exact(Metric::wdt_sinr), b = exact(Metric::wet_ehp), s = exact(Metric::idet_special);
            const double tol = 10.0 * quad_.rel_tol_target;
            return {idet_general(a.value, b.value, s.value, tol),
                    std::max({a.richardson_delta, b.richardson_delta, s.richardson_delta})};
        }
        }
        return {};
    }

    SystemConfig cfg_;
    QuadratureSpec quad_;
    std::optional<KernelContext> ctx_;
    std::map<Metric, QuadValue> exact_;
};

inline std::string error_kind(const std::exception& e) {
    if (auto n = dynamic_cast<const NumericalError*>(&e)) return to_string(n->kind());
    if (dynamic_cast<const ValidationError*>(&e)) return "validation";
    return "internal";
}

} // namespace detail

inline SystemConfig cell_config(const SweepSpec& spec, std::size_t cell) {
    SystemConfig c = spec.base;
    if (!spec.axis.empty()) apply_field(c, spec.axis, spec.values.at(cell));
    return c;
}

inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult res;
    res.axis = spec.axis;
    const std::size_t ncell = spec.axis.empty() ? 1 : spec.values.size();
    using clock = std::chrono::steady_clock;
    for (std::size_t cell = 0; cell < ncell; ++cell) {
        const SystemConfig cfg = cell_config(spec, cell);
        const std::string label = spec.axis.empty() ? "-" : spec.values[cell];
        QuadratureSpec quad = spec.quad;
        quad.workers = spec.workers;
        detail::CellEvaluator eval(cfg, quad);
        std::optional<OutageCounts> counts;
        std::string mc_error;
        double mc_seconds = 0.0;
        for (const auto& req : spec.metrics) {
            SweepRow row;
            row.axis_value = label;
            row.metric = req.metric;
            row.method = req.method;
            const auto t0 = clock::now();
            try {
                if (req.method == Method::mc) {
                    if (!counts && mc_error.empty()) {
                        McOptions o;
                        o.trials = spec.trials;
                        o.seed = spec.common_random_numbers ? spec.seed : detail::splitmix64(spec.seed ^ cell);
                        o.workers = spec.workers;
                        counts = simulate_outages(cfg, o);
                        mc_seconds = std::chrono::duration<double>(clock::now() - t0).count();
                    }
                    if (!counts) throw ValidationError(mc_error);
                    const OutageEstimate e = counts->estimate(req.metric);
                    row.value = e.value;
                    row.ci = e.ci_half_width;
                    row.trials = e.trials;
                    if (spec.timing) row.seconds = mc_seconds;
                } else if (req.method == Method::exact) {
                    const QuadValue v = eval.exact(req.metric);
                    row.value = v.value;
                    if (quad.richardson_check) row.quad_delta = v.richardson_delta;
                } else {
                    row.value = eval.closed(req.metric, req.method);
                }
            } catch (const std::exception& e) {
                row.value = std::numeric_limits<double>::quiet_NaN();
                row.error = detail::error_kind(e);
                if (req.method == Method::mc && mc_error.empty()) mc_error = e.what();
                if (row.error == "validation")
                    res.any_validation_failure = true;
                else
                    res.any_numerical_failure = true;
            }
            if (spec.timing && !row.seconds && req.method != Method::mc)
                row.seconds = std::chrono::duration<double>(clock::now() - t0).count();
            res.rows.push_back(std::move(row));
        }
    }
    return res;
}

// ---- MC against exact ----

struct CompareLine {
    std::string axis_value;
    Metric metric = Metric::wdt_sinr;
    double mc = 0.0, ci = 0.0, exact = 0.0;
    bool pass = false;
    std::string error;
};

struct CompareReport {
    std::vector<CompareLine> lines;
    std::size_t passed() const {
        std::size_t n = 0;
        for (const auto& l : lines) n += l.pass;
        return n;
    }
    bool all_pass() const { return passed() == lines.size(); }
};

inline CompareReport compare(const SweepResult& res) {
    CompareReport rep;
    for (const auto& mc : res.rows) {
        if (mc.method != Method::mc) continue;
        for (const auto& ex : res.rows) {
            if (ex.method != Method::exact || ex.metric != mc.metric || ex.axis_value != mc.axis_value) continue;
            CompareLine l;
            l.axis_value = mc.axis_value;
            l.metric = mc.metric;
            l.mc = mc.value;
            l.ci = mc.ci.value_or(0.0);
            l.exact = ex.value;
            l.error = !mc.error.empty() ? mc.error : ex.error;
            l.pass = l.error.empty() && std::fabs(l.mc - l.exact) <= 3.0 * l.ci;
            rep.lines.push_back(l);
        }
    }
    return rep;
}

inline void require_comparable(const SweepSpec& spec) {
    for (const auto& a : spec.metrics)
        if (a.method == Method::mc)
            for (const auto& b : spec.metrics)
                if (b.method == Method::exact && b.metric == a.metric) return;
    throw ValidationError("compare needs at least one metric requested with both MC and EXACT");
}

// ---- output ----

namespace detail {

// shortest text that reads back to the same double
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char ch : s) {
        if (ch == '"') o += '"';
        o += ch;
    }
    return o + "\"";
}

} // namespace detail

inline const char* csv_header() { return "axis,metric,method,value,ci,trials,seconds,quad_delta,error"; }

inline std::string to_csv(const SweepResult& res) {
    std::ostringstream o;
    o << csv_header() << '\n';
    for (const auto& r : res.rows) {
        o << detail::csv_field(r.axis_value) << ',' << to_string(r.metric) << ',' << to_string(r.method) << ','
          << detail::fmt_double(r.value) << ',' << (r.ci ? detail::fmt_double(*r.ci) : "") << ','
          << (r.method == Method::mc && r.error.empty() ? std::to_string(r.trials) : "") << ','
          << (r.seconds ? detail::fmt_double(*r.seconds) : "") << ','
          << (r.quad_delta ? detail::fmt_double(*r.quad_delta) : "") << ',' << r.error << '\n';
    }
    return o.str();
}

inline nlohmann::ordered_json to_json(const SweepSpec& spec, const SweepResult& res) {
    using nlohmann::ordered_json;
    auto num = [](double v) -> ordered_json {
        if (!std::isfinite(v)) return nullptr;
        return v;
    };
    ordered_json j;
    j["axis"] = spec.axis.empty() ? ordered_json(nullptr) : ordered_json(spec.axis);
    ordered_json scen = ordered_json::object();
    for (const auto& [k, v] : spec.base_tokens) scen[k] = v;
    j["scenario"] = scen;
    const SystemConfig& b = spec.base;
    j["resolved"] = {{"n_users", b.n_users},
                     {"n_ports", b.n_ports},
                     {"fa_size", b.fa_size},
                     {"mu", b.correlation()},
                     {"ps_ratio", b.ps_ratio},
                     {"tx_power", b.tx_power},
                     {"distance", b.distance},
                     {"pathloss_exp", b.pathloss_exp},
                     {"sinr_threshold", b.sinr_threshold},
                     {"ehp_threshold", b.ehp_threshold},
                     {"rician_k", b.rician_k},
                     {"bandwidth", b.bandwidth},
                     {"fixed_power", b.fixed_power}};
    ordered_json run;
    run["trials"] = spec.trials;
    run["seed"] = spec.seed;
    run["common_random_numbers"] = spec.common_random_numbers;
    run["quadrature"] = {{"nodes_semiinfinite", spec.quad.nodes_semiinfinite},
                         {"nodes_finite", spec.quad.nodes_finite},
                         {"rel_tol_target", spec.quad.rel_tol_target},
                         {"richardson_check", spec.quad.richardson_check}};
    run["rician_wet_threshold"] = "X + Y < (1 + rician_k) q_hat";
    j["run"] = run;
    ordered_json rows = ordered_json::array();
    for (const auto& r : res.rows) {
        ordered_json row;
        row["axis"] = r.axis_value;
        row["metric"] = to_string(r.metric);
        row["method"] = to_string(r.method);
        row["value"] = num(r.value);
        row["ci"] = r.ci ? num(*r.ci) : ordered_json(nullptr);
        row["trials"] = r.method == Method::mc && r.error.empty() ? ordered_json(r.trials) : ordered_json(nullptr);
        row["seconds"] = r.seconds ? num(*r.seconds) : ordered_json(nullptr);
        row["quad_delta"] = r.quad_delta ? num(*r.quad_delta) : ordered_json(nullptr);
        row["error"] = r.error.empty() ? ordered_json(nullptr) : ordered_json(r.error);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

inline std::string render(const SweepSpec& spec, const SweepResult& res) {
    if (spec.format == OutputFormat::json) return to_json(spec, res).dump(2) + "\n";
    return to_csv(res);
}

// temp file in the target directory, then rename over the destination
inline void write_atomically(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path dest(path);
    fs::path tmp = dest;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw ValidationError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, dest, ec);
    if (ec) {
        fs::remove(tmp);
        throw ValidationError("cannot rename onto " + path + ": " + ec.message());
    }
}

} // namespace fama

#endif
