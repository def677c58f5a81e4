#pragma once
// schemes.hpp - empty-buffer framing schemes
//
//   Ideal       the decoder learns of an empty buffer for free (no bit sent)
//   Naive       idle boundary sends a lone 0; every message is 1 + codeword
//   Predictive  a null codeword is part of the code, sized from the idle
//               fraction 1 - q E[L] of the ideal system
//   Adaptive    Predictive, but a null codeword in flight may be abandoned for
//               a newly arrived message whose codeword extends the bits sent

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"
#include "coding.hpp"
#include "errors.hpp"
#include "source_model.hpp"
#include "text.hpp"

namespace aoicode {

inline constexpr std::string_view kNullSymbol = "NULL";

enum class SchemeKind { Ideal, Naive, Predictive, Adaptive };

inline std::string_view to_string(SchemeKind k) {
    switch (k) {
    case SchemeKind::Ideal: return "ideal";
    case SchemeKind::Naive: return "naive";
    case SchemeKind::Predictive: return "predictive";
    case SchemeKind::Adaptive: return "adaptive";
    }
    return "?";
}

inline SchemeKind parse_scheme_kind(std::string_view s) {
    if (s == "ideal") return SchemeKind::Ideal;
    if (s == "naive") return SchemeKind::Naive;
    if (s == "predictive") return SchemeKind::Predictive;
    if (s == "adaptive") return SchemeKind::Adaptive;
    throw ParseError("unknown scheme '" + std::string(s) + "'");
}

struct SchemeSpec {
    SchemeKind kind = SchemeKind::Ideal;
    Codebook message_codebook;
    std::optional<std::string> null_codeword;
    std::optional<double> null_prob_used;
    bool preemptible = false;

    bool has_null() const noexcept { return null_codeword.has_value(); }

    // Message codewords plus the null codeword (appended last).
    Codebook union_codebook() const {
        std::vector<std::string> syms(message_codebook.symbols().begin(), message_codebook.symbols().end());
        std::vector<std::string> cws(message_codebook.codewords().begin(), message_codebook.codewords().end());
        if (null_codeword) {
            syms.emplace_back(kNullSymbol);
            cws.push_back(*null_codeword);
        }
        return Codebook(std::move(syms), std::move(cws));
    }

    // Bits put on the wire for one message.
    std::string wire_bits(std::size_t message_index) const {
        const auto& cw = message_codebook.codeword(message_index);
        return kind == SchemeKind::Naive ? "1" + cw : cw;
    }

    int max_wire_length() const {
        int m = 0;
        for (std::size_t i = 0; i < message_codebook.size(); ++i)
            m = std::max(m, static_cast<int>(wire_bits(i).size()));
        if (null_codeword) m = std::max(m, static_cast<int>(null_codeword->size()));
        return std::max(m, 1);
    }

    void validate() const {
        const bool wants_null = kind == SchemeKind::Predictive || kind == SchemeKind::Adaptive;
        if (wants_null != has_null())
            throw ConfigError(std::string(to_string(kind)) + " scheme " +
                              (wants_null ? "requires" : "must not carry") + " a null codeword");
        if (message_codebook.index_of(kNullSymbol) != message_codebook.size())
            throw ConfigError("'NULL' is reserved for the null symbol");
        if (null_prob_used && !(*null_prob_used > 0.0 && *null_prob_used < 1.0))
            throw ConfigError("null probability must lie in (0, 1)");
        if (preemptible != (kind == SchemeKind::Adaptive))
            throw ConfigError("only the adaptive scheme is preemptible");
        const auto all = union_codebook();
        if (!all.is_prefix_free()) throw FeasibilityError("scheme codebook is not prefix-free");
        const int kraft = kraft_compare(all.lengths());
        if (kraft > 0) throw FeasibilityError("scheme codebook violates the Kraft inequality");
        if (wants_null && kraft != 0) throw FeasibilityError("codebook with a null codeword must be complete");
    }
};

inline SchemeSpec build_ideal(const SourcePMF& pmf, const ArrivalSpec& arrival,
                              std::optional<int> max_len = std::nullopt) {
    SchemeSpec s;
    s.kind = SchemeKind::Ideal;
    s.message_codebook = age_optimal_code(pmf, arrival, max_len);
    return s;
}

struct NaiveOptions {
    // Off: reuse the ideal age-optimal code and pad it. On: pick the boundary
    // code minimizing the naive peak-age formula instead.
    bool reoptimize = false;
};

inline SchemeSpec build_naive(const SourcePMF& pmf, const ArrivalSpec& arrival,
                              std::optional<int> max_len = std::nullopt, NaiveOptions opts = {}) {
    const int ml = max_len.value_or(default_max_len(pmf));
    const auto chain = boundary_codes(pmf.probs(), ml);
    const double q = arrival.q();
    const auto best = opts.reoptimize ? select_on_boundary(chain, naive_paoi_score(q), q, 1.0)
                                      : select_on_boundary(chain, ideal_paoi_score(q), q);
    if (!is_stable_naive(q, best.moments))
        throw InstabilityError(best.moments.mean_len + 1.0, 1.0 / q,
                               "naive framing unstable: E[L]+1=" + text::format_double(best.moments.mean_len + 1.0) +
                                   " >= 1/q=" + text::format_double(1.0 / q));
    SchemeSpec s;
    s.kind = SchemeKind::Naive;
    s.message_codebook = canonical_assign(pmf, best.lengths);
    return s;
}

// Source with the null symbol inserted ahead of the first symbol it is at
// least as likely as, so equal-probability ties hand it the shorter codeword.
inline SourcePMF augment_with_null(const SourcePMF& pmf, double null_prob) {
    if (pmf.index_of(kNullSymbol) != pmf.size())
        throw InvalidAlphabetError("source already uses the reserved identifier 'NULL'");
    std::vector<std::string> syms;
    std::vector<double> probs;
    bool placed = false;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        const double p = (1.0 - null_prob) * pmf.prob(i);
        if (!placed && null_prob >= p) {
            syms.emplace_back(kNullSymbol);
            probs.push_back(null_prob);
            placed = true;
        }
        syms.push_back(pmf.symbol(i));
        probs.push_back(p);
    }
    if (!placed) {
        syms.emplace_back(kNullSymbol);
        probs.push_back(null_prob);
    }
    // Renormalize rounding so the augmented source passes validation.
    double sum = 0.0;
    for (double p : probs) sum += p;
    for (double& p : probs) p /= sum;
    return SourcePMF(std::move(syms), std::move(probs));
}

// Predictive encoding, single pass:
//   1. E = age-optimal code with free empty-buffer signaling
//   2. p_null = 1 - q E[L(E)]; P'(x) = (1 - p_null) P(x), P'(NULL) = p_null
//   3. age-optimal code for the augmented source at the same q
inline SchemeSpec build_predictive(const SourcePMF& pmf, const ArrivalSpec& arrival,
                                   std::optional<int> max_len = std::nullopt) {
    const int ml = max_len.value_or(default_max_len(pmf));
    const double q = arrival.q();
    const auto ideal = age_optimal_lengths(pmf.probs(), q, ml);
    const double p_null = 1.0 - q * ideal.moments.mean_len;
    if (!(p_null >= kMinSymbolProb && p_null < 1.0))
        throw DegenerateLoadError("null probability 1 - qE[L] = " + text::format_double(p_null) +
                                  " outside (0, 1); load q E[L] = " + text::format_double(q * ideal.moments.mean_len));

    const auto aug = augment_with_null(pmf, p_null);
    const auto code = age_optimal_lengths(aug.probs(), q, ml + 1);
    const auto full = canonical_assign(aug, code.lengths);

    std::vector<std::string> syms, cws;
    SchemeSpec s;
    for (std::size_t i = 0; i < aug.size(); ++i) {
        if (aug.symbol(i) == kNullSymbol) {
            s.null_codeword = full.codeword(i);
        } else {
            syms.push_back(aug.symbol(i));
            cws.push_back(full.codeword(i));
        }
    }
    s.kind = SchemeKind::Predictive;
    s.message_codebook = Codebook(std::move(syms), std::move(cws));
    s.null_prob_used = p_null;
    return s;
}

// Same code as base; the simulator may preempt an in-flight null codeword.
inline SchemeSpec build_adaptive(const SchemeSpec& base) {
    if (!base.has_null()) throw ConfigError("adaptive scheme needs a base scheme with a null codeword");
    SchemeSpec s = base;
    s.kind = SchemeKind::Adaptive;
    s.preemptible = true;
    return s;
}

// Codebook text format plus `# scheme=`, `# p_null=` and `# preemptible=`
// headers; the null codeword is listed under the identifier NULL.
inline std::string serialize_scheme(const SchemeSpec& s, const std::optional<CodeMoments>& m = std::nullopt) {
    std::vector<std::string> headers{"scheme=" + std::string(to_string(s.kind))};
    if (s.null_prob_used) headers.push_back("p_null=" + text::format_double(*s.null_prob_used));
    headers.push_back(std::string("preemptible=") + (s.preemptible ? "1" : "0"));
    return serialize_codebook(s.union_codebook(), m, headers);
}

inline SchemeSpec parse_scheme(std::string_view content) {
    auto parsed = parse_codebook(content);
    SchemeSpec s;
    const auto kind_it = parsed.headers.find("scheme");
    s.kind = kind_it == parsed.headers.end() ? SchemeKind::Ideal : parse_scheme_kind(kind_it->second);
    if (auto it = parsed.headers.find("p_null"); it != parsed.headers.end())
        s.null_prob_used = text::parse_double(it->second, "p_null");
    s.preemptible = s.kind == SchemeKind::Adaptive;
    if (auto it = parsed.headers.find("preemptible"); it != parsed.headers.end())
        s.preemptible = it->second == "1" || it->second == "true";

    std::vector<std::string> syms, cws;
    const auto& cb = parsed.codebook;
    for (std::size_t i = 0; i < cb.size(); ++i) {
        if (cb.symbol(i) == kNullSymbol) {
            s.null_codeword = cb.codeword(i);
        } else {
            syms.push_back(cb.symbol(i));
            cws.push_back(cb.codeword(i));
        }
    }
    s.message_codebook = Codebook(std::move(syms), std::move(cws));
    s.validate();
    return s;
}

} // namespace aoicode
