#pragma once
// verify.hpp - self-check suite: optimal codes against exhaustive search,
// boundary geometry, closed forms against simulation, scripted traces

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "coding.hpp"
#include "decoder.hpp"
#include "scenarios.hpp"
#include "schemes.hpp"
#include "simulator.hpp"
#include "source_model.hpp"
#include "text.hpp"

namespace aoicode {

enum class VerifyLevel { Quick, Full };

inline VerifyLevel parse_verify_level(std::string_view s) {
    if (s == "quick") return VerifyLevel::Quick;
    if (s == "full") return VerifyLevel::Full;
    throw ConfigError("verify level must be 'quick' or 'full'");
}

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
    std::string text() const {
        std::string out;
        for (const auto& c : checks)
            out += std::string(c.passed ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : ": " + c.detail) + '\n';
        return out;
    }
};

namespace detail {

inline SourcePMF random_source(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p) sum += x = w(rng);
    for (auto& x : p) x /= sum;
    return SourcePMF(numbered_symbols(n), std::move(p));
}

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

inline CheckResult check(std::string name, const std::function<std::string()>& body) {
    CheckResult r{std::move(name), false, {}};
    try {
        r.detail = body();
        r.passed = true;
    } catch (const std::exception& e) {
        r.detail = e.what();
    }
    return r;
}

[[noreturn]] inline void fail(const std::string& why) { throw Error(why); }

inline std::string check_package_merge(int trials) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng() % 5;
        const int max_len = std::max(min_feasible_max_len(n), static_cast<int>(1 + rng() % 6));
        const auto pmf = random_source(rng, n);
        const PenaltyWeights w{u(rng), u(rng) + 1e-3};
        const auto pm = min_linear_penalty_lengths(pmf.probs(), w, max_len);
        const auto bf = brute_force_optimal_lengths(pmf.probs(), penalty_score(w), max_len);
        const double a = penalty(moments(pmf.probs(), pm), w), b = penalty(moments(pmf.probs(), bf), w);
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b)))
            fail("trial " + std::to_string(t) + ": package-merge penalty " + text::format_double(a) +
                 " vs exhaustive " + text::format_double(b));
    }
    return std::to_string(trials) + " random instances";
}

inline std::string check_hull(int trials) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < trials; ++t) {
        const auto pmf = random_source(rng, 3 + rng() % 6);
        const auto chain = boundary_codes(pmf);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            if (kraft_compare(chain[i].lengths) > 0) fail("boundary code violates Kraft");
            if (i > 0 && !(chain[i].moments.mean_len > chain[i - 1].moments.mean_len &&
                           chain[i].moments.second_moment < chain[i - 1].moments.second_moment))
                fail("boundary chain not monotone");
            if (i > 1 && !(detail::turn(chain[i - 2].moments, chain[i - 1].moments, chain[i].moments) > 0.0))
                fail("boundary chain not convex");
        }
        // the chain must contain the unconstrained minimizers of both moments
        const auto m1 = moments(pmf.probs(), min_linear_penalty_lengths(pmf.probs(), {1.0, 0.0}, default_max_len(pmf)));
        const auto m2 = moments(pmf.probs(), min_linear_penalty_lengths(pmf.probs(), {0.0, 1.0}, default_max_len(pmf)));
        if (!close(chain.front().moments.mean_len, m1.mean_len, 1e-12) ||
            !close(chain.back().moments.second_moment, m2.second_moment, 1e-12))
            fail("chain endpoints are not the moment minimizers");
    }
    return std::to_string(trials) + " random sources";
}

inline std::string check_optimal_rate() {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto pmf = random_source(rng, 3 + rng() % 8);
        const auto m = boundary_codes(pmf).front().moments;
        const auto opt = optimal_arrival_rate(m);
        if (!opt.feasible) continue;
        if (!close(paoi_ideal(opt.q_star, m), opt.paoi, 1e-9)) fail("closed-form optimum disagrees with the formula");
        for (double f : {0.97, 1.03}) {
            const double q = opt.q_star * f;
            if (is_stable(q, m) && paoi_ideal(q, m) < opt.paoi) fail("a neighbouring rate beats q*");
        }
    }
    return "20 random codes";
}

inline std::string check_golden_traces() {
    auto at = [](const Trace& tr, std::int64_t t) -> const SlotRecord& { return tr.slots.at(static_cast<std::size_t>(t)); };
    auto decoded = [&](const Trace& tr, std::int64_t t) {
        const auto& r = at(tr, t);
        return r.decoded ? tr.symbols[*r.decoded] : std::string();
    };
    const auto a = run_trace(scenarios::ideal_burst());
    if (decoded(a, 3) != "C" || at(a, 3).age != 3) fail("ideal burst: C must decode at t=3 with age 3");
    if (decoded(a, 5) != "B") fail("ideal burst: B must decode at t=5");
    if (decoded(a, 9) != "A" || at(a, 9).age != 1) fail("ideal burst: A must reset the age to 1");
    const auto b = run_trace(scenarios::null_deferral());
    if (decoded(b, 10) != "A" || at(b, 10).age != 2) fail("null deferral: A must wait one slot behind the null bit");
    const auto c = run_trace(scenarios::null_preemption());
    if (decoded(c, 3) != "B" || at(c, 3).age != 1 || c.switches != 1)
        fail("null preemption: B must take over the null codeword and decode at t=3");
    return "three scripted scenarios";
}

inline std::string check_decoder_inversion(std::int64_t horizon) {
    const auto pmf = uniform_pmf(8);
    const ArrivalSpec arrival(0.15);
    const auto predictive = build_predictive(pmf, arrival);
    const std::vector<SchemeSpec> schemes{build_ideal(pmf, arrival), build_naive(pmf, arrival), predictive,
                                          build_adaptive(predictive)};
    for (const auto& s : schemes) {
        SimConfig cfg;
        cfg.scheme = s;
        cfg.source = pmf;
        cfg.q = arrival.q();
        cfg.horizon = horizon;
        cfg.warmup = 0;
        cfg.seed = 3;
        const auto tr = run_trace(cfg);
        const auto got = decode_stream(s, tr.channel_stream());
        std::vector<std::size_t> want;
        for (const auto& d : tr.deliveries) want.push_back(d.symbol);
        if (got != want) fail(std::string(to_string(s.kind)) + ": decoded stream differs from deliveries");
        if (got.size() > tr.arrival_sequence.size() ||
            !std::equal(got.begin(), got.end(), tr.arrival_sequence.begin()))
            fail(std::string(to_string(s.kind)) + ": decoded symbols differ from the arrival order");
        if (got.size() < 10) fail(std::string(to_string(s.kind)) + ": too few deliveries to be meaningful");
    }
    return "4 schemes, " + std::to_string(horizon) + " slots each";
}

// Simulated peak age against the closed form for the ideal and padded schemes.
inline std::string check_convergence(std::int64_t horizon, double tolerance) {
    for (const auto& pmf : {uniform_pmf(4), zipf_pmf(8, 1.0)}) {
        for (double q : {0.1, 0.2}) {
            const ArrivalSpec arrival(q);
            const auto ideal = build_ideal(pmf, arrival);
            const auto naive = build_naive(pmf, arrival);
            const auto m = moments(pmf, ideal.message_codebook.lengths());
            for (const auto* s : {&ideal, &naive}) {
                const bool is_naive = s->kind == SchemeKind::Naive;
                const auto ms = moments(pmf, s->message_codebook.lengths());
                const double want = is_naive ? paoi_naive(q, ms) : paoi_ideal(q, m);
                SimConfig cfg;
                cfg.scheme = *s;
                cfg.source = pmf;
                cfg.q = q;
                cfg.warmup = default_warmup(*s);
                cfg.horizon = cfg.warmup + horizon;
                cfg.seed = 11;
                const double got = run(cfg).empirical_paoi;
                if (!close(got, want, tolerance))
                    fail(std::string(to_string(s->kind)) + " q=" + text::format_double(q) + ": simulated " +
                         text::format_double(got) + " vs formula " + text::format_double(want));
            }
        }
    }
    return std::to_string(horizon) + " slots per point, tolerance " + text::format_double(tolerance * 100) + "%";
}

} // namespace detail

inline VerifyReport run_verify(VerifyLevel level) {
    const bool full = level == VerifyLevel::Full;
    VerifyReport rep;
    rep.checks.push_back(detail::check("package_merge_vs_exhaustive",
                                       [&] { return detail::check_package_merge(full ? 200 : 40); }));
    rep.checks.push_back(detail::check("boundary_chain", [&] { return detail::check_hull(full ? 100 : 20); }));
    rep.checks.push_back(detail::check("optimal_arrival_rate", [] { return detail::check_optimal_rate(); }));
    rep.checks.push_back(detail::check("scripted_traces", [] { return detail::check_golden_traces(); }));
    rep.checks.push_back(detail::check("decoder_inversion",
                                       [&] { return detail::check_decoder_inversion(full ? 100'000 : 5'000); }));
    rep.checks.push_back(detail::check("simulation_vs_formula", [&] {
        return full ? detail::check_convergence(1'000'000, 0.02) : detail::check_convergence(200'000, 0.05);
    }));
    return rep;
}

// Structural invariants of a codebook file. Parsing skips validation so each
// broken invariant is reported by name.
inline VerifyReport verify_codebook_fixture(std::string_view content) {
    VerifyReport rep;
    ParsedCodebook parsed;
    try {
        parsed = parse_codebook(content, false);
    } catch (const std::exception& e) {
        rep.checks.push_back({"parse", false, e.what()});
        return rep;
    }
    const auto& cb = parsed.codebook;
    rep.checks.push_back({"prefix_free", cb.is_prefix_free(), ""});
    const int kraft = kraft_compare(cb.lengths());
    const std::string sum = "sum=" + text::format_double(kraft_sum(cb.lengths()));
    rep.checks.push_back({"kraft_inequality", kraft <= 0, sum});
    rep.checks.push_back({"kraft_complete", kraft == 0, sum});
    if (auto it = parsed.headers.find("symbols"); it != parsed.headers.end())
        rep.checks.push_back({"symbol_count", it->second == std::to_string(cb.size()),
                              "header " + it->second + ", listed " + std::to_string(cb.size())});
    return rep;
}

} // namespace aoicode
