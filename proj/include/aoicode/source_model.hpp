#pragma once
// source_model.hpp - discrete memoryless sources and Bernoulli arrivals

#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace aoicode {

inline constexpr double kPmfSumTolerance = 1e-12;
inline constexpr double kMinSymbolProb = 1e-12;

// Finite alphabet with strictly positive probabilities. Position in the list
// is the canonical tie-break order for everything downstream.
class SourcePMF {
public:
    SourcePMF(std::vector<std::string> symbols, std::vector<double> probs)
        : symbols_(std::move(symbols)), probs_(std::move(probs)) {
        if (symbols_.size() != probs_.size())
            throw AlignmentError("symbol and probability lists differ in length");
        if (symbols_.size() < 2)
            throw InvalidAlphabetError("alphabet needs at least two symbols");
        std::set<std::string_view> seen;
        double sum = 0.0;
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (symbols_[i].empty())
                throw InvalidAlphabetError("empty symbol identifier");
            if (!seen.insert(symbols_[i]).second)
                throw InvalidAlphabetError("duplicate symbol '" + symbols_[i] + "'");
            if (!(probs_[i] >= kMinSymbolProb) || !std::isfinite(probs_[i]))
                throw InvalidAlphabetError("probability of '" + symbols_[i] + "' must be >= 1e-12");
            sum += probs_[i];
        }
        if (std::abs(sum - 1.0) > kPmfSumTolerance)
            throw InvalidAlphabetError("probabilities sum to " + text::format_double(sum) + ", not 1");
    }

    std::size_t size() const noexcept { return symbols_.size(); }
    std::span<const std::string> symbols() const noexcept { return symbols_; }
    std::span<const double> probs() const noexcept { return probs_; }
    const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
    double prob(std::size_t i) const { return probs_.at(i); }

    // Index of a symbol identifier, or size() if absent.
    std::size_t index_of(std::string_view id) const noexcept {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i] == id) return i;
        return symbols_.size();
    }

    friend bool operator==(const SourcePMF&, const SourcePMF&) = default;

private:
    std::vector<std::string> symbols_;
    std::vector<double> probs_;
};

// Per-slot arrival probability; interarrival times are Geometric(q).
class ArrivalSpec {
public:
    explicit ArrivalSpec(double q) : q_(q) {
        if (!(q > 0.0 && q < 1.0))
            throw ConfigError("arrival probability must lie in (0, 1), got " + text::format_double(q));
    }

    double q() const noexcept { return q_; }
    double mean_interarrival() const noexcept { return 1.0 / q_; }

private:
    double q_;
};

namespace detail {
inline std::vector<std::string> numbered_symbols(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}
} // namespace detail

inline SourcePMF uniform_pmf(int n) {
    if (n < 2) throw InvalidAlphabetError("uniform source needs n >= 2");
    return SourcePMF(detail::numbered_symbols(static_cast<std::size_t>(n)),
                     std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

// Rank-x probability proportional to x^-s.
inline SourcePMF zipf_pmf(int n, double s) {
    if (n < 2) throw InvalidAlphabetError("Zipf source needs n >= 2");
    if (!(s >= 0.0)) throw InvalidAlphabetError("Zipf exponent must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (int k = 1; k <= n; ++k) {
        w[k - 1] = std::pow(static_cast<double>(k), -s);
        norm += w[k - 1];
    }
    for (auto& x : w) x /= norm;
    return SourcePMF(detail::numbered_symbols(static_cast<std::size_t>(n)), std::move(w));
}

// Shannon entropy in bits per symbol.
inline double entropy(const SourcePMF& pmf) {
    double h = 0.0;
    for (double p : pmf.probs()) h -= p * std::log2(p);
    return h;
}

// Source-spec text: `<identifier> <probability>` per line, '#' starts a comment.
inline SourcePMF parse_source(std::string_view content) {
    std::vector<std::string> symbols;
    std::vector<double> probs;
    std::size_t lineno = 0;
    for (auto line : text::lines(content)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto f = text::fields(line);
        if (f.empty()) continue;
        if (f.size() != 2)
            throw ParseError("source line " + std::to_string(lineno) + ": expected '<identifier> <probability>'");
        symbols.emplace_back(f[0]);
        probs.push_back(text::parse_double(f[1], "probability"));
    }
    return SourcePMF(std::move(symbols), std::move(probs));
}

inline std::string serialize_source(const SourcePMF& pmf) {
    std::string out = "# source: " + std::to_string(pmf.size()) + " symbols\n";
    for (std::size_t i = 0; i < pmf.size(); ++i)
        out += pmf.symbol(i) + ' ' + text::format_double(pmf.prob(i)) + '\n';
    return out;
}

} // namespace aoicode
