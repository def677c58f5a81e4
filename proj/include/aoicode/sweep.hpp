#pragma once
// sweep.hpp - peak age versus arrival rate for several framing schemes

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "coding.hpp"
#include "errors.hpp"
#include "schemes.hpp"
#include "simulator.hpp"
#include "source_model.hpp"
#include "text.hpp"

namespace aoicode {

// Builtin generators `uniform:<n>` and `zipf:<n>:<s>`, otherwise a path to a
// source-spec file.
inline SourcePMF load_source(const std::string& spec, const std::filesystem::path& base = {}) {
    const auto parts = text::split(spec, ':');
    if (parts.size() == 2 && parts[0] == "uniform")
        return uniform_pmf(static_cast<int>(text::parse_int(parts[1], "alphabet size")));
    if (parts.size() == 3 && parts[0] == "zipf")
        return zipf_pmf(static_cast<int>(text::parse_int(parts[1], "alphabet size")),
                        text::parse_double(parts[2], "Zipf exponent"));
    std::filesystem::path p(spec);
    if (p.is_relative() && !base.empty()) p = base / p;
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open source file '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_source(ss.str());
}

struct SweepSpec {
    std::string source_name;
    SourcePMF source = uniform_pmf(2);
    std::vector<SchemeKind> schemes;
    std::vector<double> q_grid;
    std::int64_t horizon = 1'000'000;         // post-warmup slots per point
    std::optional<std::int64_t> warmup;       // default per scheme
    std::uint64_t seed = 1;
    bool analytic = true;
    std::optional<int> max_len;
    unsigned jobs = 1;

    void validate() const {
        if (schemes.empty()) throw ConfigError("sweep needs at least one scheme");
        if (q_grid.empty()) throw ConfigError("sweep needs at least one arrival rate");
        for (std::size_t i = 0; i < q_grid.size(); ++i) {
            if (!(q_grid[i] > 0.0 && q_grid[i] < 1.0)) throw ConfigError("q values must lie in (0, 1)");
            if (i > 0 && !(q_grid[i] > q_grid[i - 1])) throw ConfigError("q grid must be strictly increasing");
        }
        if (horizon <= 0) throw ConfigError("horizon must be positive");
    }
};

// `points` values from 0.01 up to (excluding) min(1/H(X), 0.99).
inline std::vector<double> default_q_grid(const SourcePMF& pmf, int points = 50, double q_min = 0.01) {
    const double q_max = std::min(1.0 / entropy(pmf), 0.99);
    std::vector<double> grid;
    const double step = (q_max - q_min) / points;
    for (int k = 0; k < points; ++k) grid.push_back(q_min + step * k);
    return grid;
}

inline std::vector<SchemeKind> parse_scheme_list(std::string_view s) {
    std::vector<SchemeKind> out;
    for (auto part : text::split(s, ',')) {
        part = text::trim(part);
        if (part.empty()) continue;
        out.push_back(parse_scheme_kind(part));
    }
    return out;
}

// key=value lines: source, schemes, q_grid | q_min/q_max/q_points, horizon,
// warmup, seed, analytic, max_len, jobs.
inline SweepSpec parse_sweep_spec(std::string_view content, const std::filesystem::path& base = {}) {
    std::map<std::string, std::string> kv;
    std::size_t lineno = 0;
    for (auto line : text::lines(content)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("sweep spec line " + std::to_string(lineno) + ": expected key=value");
        kv[std::string(text::trim(line.substr(0, eq)))] = std::string(text::trim(line.substr(eq + 1)));
    }
    static const std::set<std::string> known{"source", "schemes", "q_grid", "q_min", "q_max", "q_points",
                                             "horizon", "warmup", "seed", "analytic", "max_len", "jobs"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw ParseError("unknown sweep key '" + k + "'");

    SweepSpec s;
    if (!kv.count("source")) throw ConfigError("sweep spec needs source=");
    s.source_name = kv["source"];
    s.source = load_source(s.source_name, base);
    s.schemes = parse_scheme_list(kv.count("schemes") ? kv["schemes"] : "ideal,naive,predictive,adaptive");
    if (kv.count("q_grid")) {
        for (auto part : text::split(kv["q_grid"], ','))
            if (!text::trim(part).empty()) s.q_grid.push_back(text::parse_double(part, "q"));
    } else {
        const int points = kv.count("q_points") ? static_cast<int>(text::parse_int(kv["q_points"], "q_points")) : 50;
        const double q_min = kv.count("q_min") ? text::parse_double(kv["q_min"], "q_min") : 0.01;
        s.q_grid = default_q_grid(s.source, points, q_min);
        if (kv.count("q_max")) {
            const double q_max = text::parse_double(kv["q_max"], "q_max");
            s.q_grid.clear();
            const double step = (q_max - q_min) / points;
            for (int k = 0; k < points; ++k) s.q_grid.push_back(q_min + step * k);
        }
    }
    if (kv.count("horizon")) s.horizon = text::parse_int(kv["horizon"], "horizon");
    if (kv.count("warmup")) s.warmup = text::parse_int(kv["warmup"], "warmup");
    if (kv.count("seed")) s.seed = static_cast<std::uint64_t>(text::parse_int(kv["seed"], "seed"));
    if (kv.count("analytic")) s.analytic = kv["analytic"] == "true" || kv["analytic"] == "1";
    if (kv.count("max_len")) s.max_len = static_cast<int>(text::parse_int(kv["max_len"], "max_len"));
    if (kv.count("jobs")) s.jobs = static_cast<unsigned>(std::max<std::int64_t>(1, text::parse_int(kv["jobs"], "jobs")));
    s.validate();
    return s;
}

struct SweepRow {
    SchemeKind scheme = SchemeKind::Ideal;
    double q = 0.0;
    double analytic_paoi = std::numeric_limits<double>::quiet_NaN();
    double empirical_paoi = std::numeric_limits<double>::quiet_NaN();
    double idle_fraction = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
    std::int64_t switches = 0;
};

// One (scheme, q) point. Construction failures count as divergence; a naive
// point whose padded code is unstable is still simulated with the ideal code
// so the blow-up shows in the empirical column.
inline SweepRow evaluate_point(const SweepSpec& spec, SchemeKind kind, double q) {
    SweepRow row;
    row.scheme = kind;
    row.q = q;
    const ArrivalSpec arrival(q);
    std::optional<SchemeSpec> scheme;
    std::optional<CodeMoments> message_moments;
    try {
        switch (kind) {
        case SchemeKind::Ideal: scheme = build_ideal(spec.source, arrival, spec.max_len); break;
        case SchemeKind::Naive: {
            auto ideal = build_ideal(spec.source, arrival, spec.max_len);
            ideal.kind = SchemeKind::Naive;
            scheme = std::move(ideal);
            break;
        }
        case SchemeKind::Predictive: scheme = build_predictive(spec.source, arrival, spec.max_len); break;
        case SchemeKind::Adaptive:
            scheme = build_adaptive(build_predictive(spec.source, arrival, spec.max_len));
            break;
        }
    } catch (const InstabilityError&) {
        row.diverged = true;
        return row;
    } catch (const DegenerateLoadError&) {
        row.diverged = true;
        return row;
    }

    if (kind == SchemeKind::Ideal || kind == SchemeKind::Naive) {
        std::vector<int> lens;
        for (const auto& sym : spec.source.symbols())
            lens.push_back(static_cast<int>(scheme->message_codebook.codeword_of(sym).size()));
        message_moments = moments(spec.source, lens);
        const bool stable = kind == SchemeKind::Ideal ? is_stable(q, *message_moments)
                                                      : is_stable_naive(q, *message_moments);
        if (!stable) row.diverged = true;
        else if (spec.analytic)
            row.analytic_paoi = kind == SchemeKind::Ideal ? paoi_ideal(q, *message_moments)
                                                          : paoi_naive(q, *message_moments);
    }

    SimConfig cfg;
    cfg.scheme = *scheme;
    cfg.source = spec.source;
    cfg.q = q;
    cfg.warmup = spec.warmup.value_or(default_warmup(cfg.scheme));
    cfg.horizon = cfg.warmup + spec.horizon;
    cfg.seed = spec.seed;
    const auto st = run(cfg);
    row.empirical_paoi = st.empirical_paoi;
    row.idle_fraction = st.idle_fraction;
    row.switches = st.switches;
    row.diverged = row.diverged || st.diverged;
    return row;
}

// Rows in q-then-scheme order regardless of how many workers ran.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::size_t per_q = spec.schemes.size();
    const std::size_t total = spec.q_grid.size() * per_q;
    std::vector<SweepRow> rows(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                rows[i] = evaluate_point(spec, spec.schemes[i % per_q], spec.q_grid[i / per_q]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(total)));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    auto num = [](double v) { return std::isfinite(v) ? text::format_double(v) : std::string(); };
    std::string out = "scheme,q,analytic_paoi,empirical_paoi,idle_fraction,diverged\n";
    for (const auto& r : rows)
        out += std::string(to_string(r.scheme)) + ',' + text::format_double(r.q) + ',' + num(r.analytic_paoi) + ',' +
               num(r.empirical_paoi) + ',' + num(r.idle_fraction) + ',' + (r.diverged ? "true" : "false") + '\n';
    return out;
}

// Self-contained SVG of peak age versus q: solid lines for simulated points,
// dashed for closed forms. Diverged points are left out; the y range is
// clipped at four times the smallest value so the valley stays readable.
inline std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& title) {
    const double width = 720, height = 480, left = 70, right = 150, top = 40, bottom = 60;
    double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
    double ymin = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        qmin = std::min(qmin, r.q);
        qmax = std::max(qmax, r.q);
        if (!r.diverged) {
            if (std::isfinite(r.empirical_paoi)) ymin = std::min(ymin, r.empirical_paoi);
            if (std::isfinite(r.analytic_paoi)) ymin = std::min(ymin, r.analytic_paoi);
        }
    }
    if (!std::isfinite(ymin)) ymin = 1.0;
    if (!(qmax > qmin)) qmax = qmin + 1e-3;
    const double y_lo = 0.0, y_hi = 4.0 * ymin;
    auto px = [&](double q) { return left + (q - qmin) / (qmax - qmin) * (width - left - right); };
    auto py = [&](double y) {
        y = std::clamp(y, y_lo, y_hi);
        return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom);
    };
    static const std::map<SchemeKind, const char*> colour{{SchemeKind::Ideal, "#1f77b4"},
                                                          {SchemeKind::Naive, "#d62728"},
                                                          {SchemeKind::Predictive, "#2ca02c"},
                                                          {SchemeKind::Adaptive, "#9467bd"}};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double q = qmin + (qmax - qmin) * k / 5.0;
        const double y = y_lo + (y_hi - y_lo) * k / 5.0;
        svg << "<text x=\"" << px(q) << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">"
            << text::format_double(std::round(q * 1000.0) / 1000.0) << "</text>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
            << text::format_double(std::round(y * 10.0) / 10.0) << "</text>\n";
    }
    svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 18
        << "\" text-anchor=\"middle\">arrival probability q</text>\n";
    svg << "<text transform=\"translate(18," << (top + height - bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">average peak age (slots)</text>\n";

    std::vector<SchemeKind> kinds;
    for (const auto& r : rows)
        if (std::find(kinds.begin(), kinds.end(), r.scheme) == kinds.end()) kinds.push_back(r.scheme);
    int legend = 0;
    for (auto kind : kinds) {
        for (int analytic = 0; analytic < 2; ++analytic) {
            std::string pts;
            for (const auto& r : rows) {
                if (r.scheme != kind || r.diverged) continue;
                const double y = analytic ? r.analytic_paoi : r.empirical_paoi;
                if (!std::isfinite(y)) continue;
                pts += text::format_double(px(r.q)) + ',' + text::format_double(py(y)) + ' ';
            }
            if (pts.empty()) continue;
            svg << "<polyline fill=\"none\" stroke=\"" << colour.at(kind) << "\" stroke-width=\"1.5\""
                << (analytic ? " stroke-dasharray=\"5,4\"" : "") << " points=\"" << pts << "\"/>\n";
            const double ly = top + 16.0 * legend++;
            svg << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 34
                << "\" y2=\"" << ly << "\" stroke=\"" << colour.at(kind) << "\""
                << (analytic ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
            svg << "<text x=\"" << width - right + 40 << "\" y=\"" << ly + 4 << "\">" << to_string(kind)
                << (analytic ? " (formula)" : " (sim)") << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace aoicode
