// aoicode - command-line front end
//
//   aoicode code      --source SRC --q Q [--max-len L] [--scheme KIND] [--out FILE]
//   aoicode simulate  --scheme KIND|FILE [--source SRC] --q Q --horizon H [--warmup W]
//                     [--seed S] [--arrivals CSV] [--trace-out FILE] [--out FILE]
//   aoicode trace     (--scenario NAME | --scheme KIND|FILE ...) [--out FILE]
//   aoicode sweep     [SPEC] [--source SRC] [--scheme LIST] [--horizon H] [--warmup W]
//                     [--seed S] [--jobs N] --out DIR
//   aoicode verify    [quick|full] [--fixture CODEBOOK]
//
// Exit status: 0 success, 1 verification failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "aoicode/analysis.hpp"
#include "aoicode/coding.hpp"
#include "aoicode/errors.hpp"
#include "aoicode/scenarios.hpp"
#include "aoicode/schemes.hpp"
#include "aoicode/simulator.hpp"
#include "aoicode/source_model.hpp"
#include "aoicode/sweep.hpp"
#include "aoicode/text.hpp"
#include "aoicode/verify.hpp"

namespace fs = std::filesystem;
using namespace aoicode;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

bool is_scheme_name(const std::string& s) {
    return s == "ideal" || s == "naive" || s == "predictive" || s == "adaptive";
}

SchemeSpec build_scheme(SchemeKind kind, const SourcePMF& pmf, double q, std::optional<int> max_len) {
    const ArrivalSpec arrival(q);
    switch (kind) {
    case SchemeKind::Ideal: return build_ideal(pmf, arrival, max_len);
    case SchemeKind::Naive: return build_naive(pmf, arrival, max_len);
    case SchemeKind::Predictive: return build_predictive(pmf, arrival, max_len);
    case SchemeKind::Adaptive: return build_adaptive(build_predictive(pmf, arrival, max_len));
    }
    throw ConfigError("unknown scheme");
}

std::string report_text(const SchemeSpec& scheme, const SourcePMF& pmf, double q) {
    std::vector<int> lens;
    for (const auto& sym : pmf.symbols()) lens.push_back(static_cast<int>(scheme.message_codebook.codeword_of(sym).size()));
    const auto m = moments(pmf, lens);
    const auto r = analyze(q, m);
    std::string out;
    auto line = [&](const std::string& k, const std::string& v) { out += k + ": " + v + '\n'; };
    line("scheme", std::string(to_string(scheme.kind)));
    line("q", text::format_double(q));
    line("mean_len", text::format_double(m.mean_len));
    line("second_moment", text::format_double(m.second_moment));
    line("load", text::format_double(r.load));
    line("stable", r.stable ? "true" : "false");
    if (scheme.kind == SchemeKind::Naive) {
        line("paoi", text::format_double(paoi_naive(q, m)));
    } else {
        if (r.stable) line("expected_wait", text::format_double(r.waiting));
        if (r.stable) line(scheme.kind == SchemeKind::Ideal ? "paoi" : "paoi_ideal_signaling", text::format_double(r.paoi));
    }
    if (r.q_star) {
        line("q_star", text::format_double(r.q_star->clamped_q));
        line("paoi_at_q_star", text::format_double(r.q_star->paoi));
        if (!r.q_star->feasible) line("q_star_note", "unconstrained optimum lies at q >= 1");
    }
    if (scheme.null_codeword) line("null_codeword", *scheme.null_codeword);
    if (scheme.null_prob_used) line("p_null", text::format_double(*scheme.null_prob_used));
    return out;
}

struct SimArgs {
    std::string scheme = "ideal";
    std::string source;
    double q = 0.0;
    std::int64_t horizon = 1'000'000;
    std::optional<std::int64_t> warmup;
    std::uint64_t seed = 1;
    std::optional<int> max_len;
    std::string arrivals;
    std::string scenario;
    std::string trace_out;
    std::string out;
};

void add_sim_options(CLI::App* cmd, SimArgs& a) {
    cmd->add_option("--scheme", a.scheme, "scheme name (built from --source and --q) or scheme file");
    cmd->add_option("--source", a.source, "source file, uniform:N or zipf:N:s");
    cmd->add_option("--q", a.q, "per-slot arrival probability");
    cmd->add_option("--horizon", a.horizon, "total slots simulated, warm-up included");
    cmd->add_option("--warmup", a.warmup, "slots excluded from statistics");
    cmd->add_option("--seed", a.seed, "random seed");
    cmd->add_option("--max-len", a.max_len, "maximum codeword length");
    cmd->add_option("--arrivals", a.arrivals, "scripted arrivals CSV (slot,symbol)");
    cmd->add_option("--out", a.out, "output file (default stdout)");
}

SimConfig sim_config(const SimArgs& a) {
    if (!a.scenario.empty()) {
        if (a.scenario == "ideal_burst") return scenarios::ideal_burst();
        if (a.scenario == "null_deferral") return scenarios::null_deferral();
        if (a.scenario == "null_preemption") return scenarios::null_preemption();
        throw ConfigError("unknown scenario '" + a.scenario + "'");
    }
    SimConfig cfg;
    std::optional<SourcePMF> pmf;
    if (!a.source.empty()) pmf = load_source(a.source);
    if (is_scheme_name(a.scheme)) {
        if (!pmf) throw ConfigError("--scheme " + a.scheme + " needs --source to build the code");
        if (!(a.q > 0.0 && a.q < 1.0)) throw ConfigError("--q must lie in (0, 1)");
        cfg.scheme = build_scheme(parse_scheme_kind(a.scheme), *pmf, a.q, a.max_len);
    } else {
        cfg.scheme = parse_scheme(read_file(a.scheme));
    }
    cfg.q = a.q;
    cfg.horizon = a.horizon;
    cfg.seed = a.seed;
    if (!a.arrivals.empty()) {
        cfg.scripted_arrivals = parse_scripted_arrivals(read_file(a.arrivals));
        cfg.warmup = a.warmup.value_or(0);
    } else {
        if (!pmf) throw ConfigError("random arrivals need --source for symbol probabilities");
        if (!(a.q > 0.0 && a.q < 1.0)) throw ConfigError("--q must lie in (0, 1)");
        cfg.source = pmf;
        cfg.warmup = a.warmup.value_or(std::min(default_warmup(cfg.scheme), a.horizon / 10));
    }
    return cfg;
}

int run_code(const SimArgs& a, const std::string& scheme_name) {
    if (a.source.empty()) throw ConfigError("code needs --source");
    if (!(a.q > 0.0 && a.q < 1.0)) throw ConfigError("--q must lie in (0, 1)");
    const auto pmf = load_source(a.source);
    const auto scheme = build_scheme(parse_scheme_kind(scheme_name), pmf, a.q, a.max_len);
    std::vector<int> lens;
    for (const auto& sym : pmf.symbols()) lens.push_back(static_cast<int>(scheme.message_codebook.codeword_of(sym).size()));
    const auto body = serialize_scheme(scheme, moments(pmf, lens));
    const auto report = report_text(scheme, pmf, a.q);
    if (a.out.empty() || a.out == "-") {
        std::cout << body;
        for (auto l : text::lines(report))
            if (!l.empty()) std::cout << "# " << l << '\n';
    } else {
        write_output(a.out, body);
        std::cout << report;
    }
    return kExitOk;
}

int run_simulate(const SimArgs& a) {
    const auto cfg = sim_config(a);
    if (!a.trace_out.empty()) {
        const auto tr = run_trace(cfg);
        write_output(a.trace_out, trace_csv(tr));
    }
    const auto st = run(cfg);
    write_output(a.out, stats_csv_header() + stats_csv_row(st));
    return kExitOk;
}

int run_trace_cmd(const SimArgs& a) {
    write_output(a.out, trace_csv(run_trace(sim_config(a))));
    return kExitOk;
}

struct SweepArgs {
    std::string spec;
    std::string source;
    std::string schemes;
    std::optional<std::int64_t> horizon;
    std::optional<std::int64_t> warmup;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::string out;
};

int run_sweep_cmd(const SweepArgs& a) {
    SweepSpec spec;
    if (!a.spec.empty()) {
        spec = parse_sweep_spec(read_file(a.spec), fs::path(a.spec).parent_path());
    } else {
        if (a.source.empty()) throw ConfigError("sweep needs a spec file or --source");
        spec.source_name = a.source;
        spec.source = load_source(a.source);
        spec.schemes = parse_scheme_list("ideal,naive,predictive,adaptive");
        spec.q_grid = default_q_grid(spec.source);
    }
    if (!a.source.empty() && !a.spec.empty()) {
        spec.source_name = a.source;
        spec.source = load_source(a.source);
    }
    if (!a.schemes.empty()) spec.schemes = parse_scheme_list(a.schemes);
    if (a.horizon) spec.horizon = *a.horizon;
    if (a.warmup) spec.warmup = *a.warmup;
    if (a.seed) spec.seed = *a.seed;
    if (a.jobs) spec.jobs = std::max(1u, *a.jobs);
    spec.validate();

    const auto rows = run_sweep(spec);
    const fs::path dir(a.out.empty() ? "." : a.out);
    fs::create_directories(dir);
    write_output((dir / "sweep.csv").string(), sweep_csv(rows));
    write_output((dir / "sweep.svg").string(), sweep_svg(rows, "Peak age vs arrival rate, " + spec.source_name));
    std::cout << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep.svg").string() << '\n';
    return kExitOk;
}

int run_verify_cmd(const std::string& level, const std::string& fixture) {
    VerifyReport rep;
    if (!fixture.empty()) {
        rep = verify_codebook_fixture(read_file(fixture));
    } else {
        rep = run_verify(parse_verify_level(level));
    }
    std::cout << rep.text();
    std::cout << (rep.passed() ? "verify: all checks passed\n" : "verify: FAILED\n");
    return rep.passed() ? kExitOk : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-of-information optimal prefix codes: construction, analysis and simulation"};
    app.require_subcommand(1);

    SimArgs code_args;
    std::string code_scheme = "ideal";
    auto* code = app.add_subcommand("code", "build the age-optimal code for a source and arrival rate");
    code->add_option("--source", code_args.source, "source file, uniform:N or zipf:N:s")->required();
    code->add_option("--q", code_args.q, "per-slot arrival probability")->required();
    code->add_option("--max-len", code_args.max_len, "maximum codeword length");
    code->add_option("--scheme", code_scheme, "ideal, naive, predictive or adaptive");
    code->add_option("--out", code_args.out, "codebook output file (default stdout)");

    SimArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "simulate a scheme and print summary statistics");
    add_sim_options(simulate, sim_args);
    simulate->add_option("--trace-out", sim_args.trace_out, "also write the per-slot trace CSV");

    SimArgs trace_args;
    trace_args.horizon = 30;
    auto* trace = app.add_subcommand("trace", "write the per-slot trace CSV of a run");
    add_sim_options(trace, trace_args);
    trace->add_option("--scenario", trace_args.scenario, "ideal_burst, null_deferral or null_preemption");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "peak age versus arrival rate for several schemes");
    sweep->add_option("spec", sweep_args.spec, "sweep spec file (key=value lines)");
    sweep->add_option("--source", sweep_args.source, "source file, uniform:N or zipf:N:s");
    sweep->add_option("--scheme", sweep_args.schemes, "comma-separated scheme list");
    sweep->add_option("--horizon", sweep_args.horizon, "post-warm-up slots per point");
    sweep->add_option("--warmup", sweep_args.warmup, "warm-up slots per point");
    sweep->add_option("--seed", sweep_args.seed, "random seed");
    sweep->add_option("--jobs", sweep_args.jobs, "concurrent simulations");
    sweep->add_option("--out", sweep_args.out, "output directory")->required();

    std::string verify_level = "quick";
    std::string verify_fixture;
    auto* verify = app.add_subcommand("verify", "run the self-check suite");
    verify->add_option("level", verify_level, "quick or full");
    verify->add_option("--fixture", verify_fixture, "check the invariants of a codebook file instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*code) return run_code(code_args, code_scheme);
        if (*simulate) return run_simulate(sim_args);
        if (*trace) return run_trace_cmd(trace_args);
        if (*sweep) return run_sweep_cmd(sweep_args);
        if (*verify) return run_verify_cmd(verify_level, verify_fixture);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
