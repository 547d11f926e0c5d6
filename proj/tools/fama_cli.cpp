#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fama/fama.hpp"

namespace {

enum Exit { ok = 0, validation_failure = 1, numerical_failure = 2 };

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> format;
    std::optional<std::string> out;
    bool timing = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("config", f.config, "scenario file (key = value lines)")->required();
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per cell");
    cmd->add_option("--seed", f.seed, "Monte Carlo seed");
    cmd->add_option("--workers", f.workers, "worker threads (default: $FAMA_WORKERS or all cores)");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out, "output file (default: stdout)");
    cmd->add_flag("--timing", f.timing, "fill the seconds column");
}

fama::SweepSpec load(const RunFlags& f) {
    fama::SweepSpec spec = fama::load_config(f.config);
    if (f.trials) spec.trials = *f.trials;
    if (f.seed) spec.seed = *f.seed;
    if (f.workers) spec.workers = *f.workers;
    if (f.format) spec.format = *f.format == "json" ? fama::OutputFormat::json : fama::OutputFormat::csv;
    if (f.out) spec.output_path = *f.out;
    if (f.timing) spec.timing = true;
    return spec;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text << std::flush;
    else
        fama::write_atomically(path, text);
}

int exit_for(const fama::SweepResult& r) {
    if (r.any_numerical_failure) return numerical_failure;
    if (r.any_validation_failure) return validation_failure;
    return ok;
}

int run_sweep_verb(const RunFlags& f) {
    const fama::SweepSpec spec = load(f);
    const fama::SweepResult res = fama::run_sweep(spec);
    emit(spec.output_path, fama::render(spec, res));
    return exit_for(res);
}

int run_eval_verb(const RunFlags& f) {
    fama::SweepSpec spec = load(f);
    spec.axis.clear();
    spec.values.clear();
    if (spec.metrics.empty())
        for (auto m : {fama::Metric::wdt_sinr, fama::Metric::wet_sinr, fama::Metric::wdt_ehp, fama::Metric::wet_ehp,
                       fama::Metric::idet_special, fama::Metric::idet_general}) {
            spec.metrics.push_back({m, fama::Method::mc});
            spec.metrics.push_back({m, fama::Method::exact});
        }
    const fama::SweepResult res = fama::run_sweep(spec);
    emit(spec.output_path, fama::render(spec, res));
    return exit_for(res);
}

int run_compare_verb(const RunFlags& f) {
    const fama::SweepSpec spec = load(f);
    fama::require_comparable(spec);
    const fama::SweepResult res = fama::run_sweep(spec);
    const fama::CompareReport rep = fama::compare(res);
    std::ostringstream o;
    o << "axis,metric,mc,ci,exact,abs_diff,bound,status\n";
    for (const auto& l : rep.lines) {
        using fama::detail::fmt_double;
        o << fama::detail::csv_field(l.axis_value) << ',' << fama::to_string(l.metric) << ',' << fmt_double(l.mc) << ','
          << fmt_double(l.ci) << ',' << fmt_double(l.exact) << ',' << fmt_double(std::fabs(l.mc - l.exact)) << ','
          << fmt_double(3.0 * l.ci) << ',' << (l.pass ? "PASS" : (l.error.empty() ? "FAIL" : "ERROR:" + l.error))
          << '\n';
    }
    emit(spec.output_path, o.str());
    std::cerr << rep.passed() << "/" << rep.lines.size() << " cells within 3 CI half-widths\n";
    for (const auto& l : rep.lines)
        if (!l.pass) std::cerr << "mismatch: " << spec.axis << "=" << l.axis_value << " " << fama::to_string(l.metric) << "\n";
    if (res.any_numerical_failure) return numerical_failure;
    return rep.all_pass() && !res.any_validation_failure ? ok : validation_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outage analysis for fluid antenna multiple access with power splitting"};
    app.require_subcommand(1);

    RunFlags sweep_flags, compare_flags, eval_flags;
    auto* sweep = app.add_subcommand("sweep", "evaluate every cell of a parameter sweep");
    add_run_flags(sweep, sweep_flags);
    auto* cmp = app.add_subcommand("compare", "check Monte Carlo against the exact integrals cell by cell");
    add_run_flags(cmp, compare_flags);
    auto* eval = app.add_subcommand("eval", "evaluate the base scenario only");
    add_run_flags(eval, eval_flags);
    double w = 0.0;
    auto* mu = app.add_subcommand("mu", "print the port correlation for an aperture of W wavelengths");
    mu->add_option("--w", w, "aperture in wavelengths")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : validation_failure;
    }

    try {
        if (*sweep) return run_sweep_verb(sweep_flags);
        if (*cmp) return run_compare_verb(compare_flags);
        if (*eval) return run_eval_verb(eval_flags);
        if (*mu) {
            if (!(w > 0.0)) throw fama::ValidationError("--w must be positive");
            std::cout << fama::detail::fmt_double(fama::mu_from_w(w)) << '\n';
            return ok;
        }
    } catch (const fama::NumericalError& e) {
        std::cerr << "numerical failure (" << fama::to_string(e.kind()) << "): " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validation_failure;
    }
    return validation_failure;
}
