#pragma once
// coding.hpp - prefix-free code construction
//
// Minimum linear-penalty codes (alpha E[L] + beta E[L^2]) are found with
// Package-Merge on a coin-collector instance; sweeping (alpha, beta) along the
// lower-left boundary of the (E[L], E[L^2]) hull yields every candidate for
// the age-optimal code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "code_moments.hpp"
#include "errors.hpp"
#include "source_model.hpp"
#include "text.hpp"

namespace aoicode {

inline constexpr double kHullRelativeTolerance = 1e-9;

// Prefix-free binary code aligned with a source's symbol order.
class Codebook {
public:
    Codebook() = default;
    Codebook(std::vector<std::string> symbols, std::vector<std::string> codewords)
        : symbols_(std::move(symbols)), codewords_(std::move(codewords)) {
        if (symbols_.size() != codewords_.size())
            throw AlignmentError("codebook symbol and codeword lists differ in length");
        for (const auto& cw : codewords_) {
            if (cw.empty()) throw FeasibilityError("codewords must be at least one bit long");
            if (cw.find_first_not_of("01") != std::string::npos)
                throw ParseError("codeword '" + cw + "' contains characters other than 0/1");
        }
    }

    std::size_t size() const noexcept { return symbols_.size(); }
    std::span<const std::string> symbols() const noexcept { return symbols_; }
    std::span<const std::string> codewords() const noexcept { return codewords_; }
    const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
    const std::string& codeword(std::size_t i) const { return codewords_.at(i); }

    std::vector<int> lengths() const {
        std::vector<int> out;
        out.reserve(codewords_.size());
        for (const auto& cw : codewords_) out.push_back(static_cast<int>(cw.size()));
        return out;
    }

    std::size_t index_of(std::string_view id) const noexcept {
        for (std::size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i] == id) return i;
        return symbols_.size();
    }

    const std::string& codeword_of(std::string_view id) const {
        const auto i = index_of(id);
        if (i == size()) throw AlignmentError("symbol '" + std::string(id) + "' not in codebook");
        return codewords_[i];
    }

    // Pairwise check; codebooks here are small.
    bool is_prefix_free() const {
        for (std::size_t i = 0; i < codewords_.size(); ++i)
            for (std::size_t j = 0; j < codewords_.size(); ++j) {
                if (i == j) continue;
                const auto& a = codewords_[i];
                const auto& b = codewords_[j];
                if (a.size() <= b.size() && b.compare(0, a.size(), a) == 0) return false;
            }
        return true;
    }

    friend bool operator==(const Codebook&, const Codebook&) = default;

private:
    std::vector<std::string> symbols_;
    std::vector<std::string> codewords_;
};

struct PenaltyWeights {
    double alpha = 1.0;
    double beta = 0.0;

    void validate() const {
        if (!(alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0))
            throw ConfigError("penalty weights must be non-negative and not both zero");
    }
};

// Sum of 2^-l.
inline double kraft_sum(std::span<const int> lengths) {
    double s = 0.0;
    for (int l : lengths) s += std::ldexp(1.0, -l);
    return s;
}

// Exact three-way comparison of the Kraft sum against 1 (-1: below, 0: equal,
// +1: above), by carrying per-depth counts towards the root.
inline int kraft_compare(std::span<const int> lengths) {
    if (lengths.empty()) return -1;
    const int depth = *std::max_element(lengths.begin(), lengths.end());
    std::vector<std::uint64_t> count(static_cast<std::size_t>(depth) + 1, 0);
    for (int l : lengths) {
        if (l < 1) throw FeasibilityError("codeword lengths must be >= 1");
        ++count[static_cast<std::size_t>(l)];
    }
    bool fractional = false;
    std::uint64_t carry = 0;
    for (int d = depth; d >= 1; --d) {
        const std::uint64_t total = count[static_cast<std::size_t>(d)] + carry;
        if (total % 2 != 0) fractional = true;
        carry = total / 2;
    }
    if (carry == 0) return -1;
    if (carry == 1 && !fractional) return 0;
    return 1;
}

inline double penalty(const CodeMoments& m, const PenaltyWeights& w) {
    return w.alpha * m.mean_len + w.beta * m.second_moment;
}

inline int default_max_len(const SourcePMF& pmf) { return static_cast<int>(pmf.size()) - 1; }

inline int min_feasible_max_len(std::size_t n) {
    int l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return std::max(l, 1);
}

namespace detail {

inline void require_feasible(std::size_t n, int max_len) {
    if (max_len < min_feasible_max_len(n) || max_len > 4096)
        throw FeasibilityError("max_len " + std::to_string(max_len) + " cannot hold a complete code over " +
                               std::to_string(n) + " symbols");
}

// Symbol indices ordered by probability descending, index ascending on ties.
inline std::vector<std::size_t> by_probability(std::span<const double> probs) {
    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    return order;
}

// Reassigns a length multiset so shorter codewords go to likelier symbols.
inline std::vector<int> assign_sorted(std::span<const double> probs, std::vector<int> lengths) {
    std::sort(lengths.begin(), lengths.end());
    const auto order = by_probability(probs);
    std::vector<int> out(probs.size());
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = lengths[r];
    return out;
}

// Package-Merge arena node: a coin (symbol >= 0) or a package of two nodes.
struct PmNode {
    double cost;
    int symbol;
    int left;
    int right;
};

} // namespace detail

// Complete-code length vector minimizing sum_i p_i (alpha l_i + beta l_i^2)
// subject to l_i <= max_len.
//
// Coin collector: growing symbol i from depth l-1 to l costs
// p_i (alpha + beta (2l - 1)) and has width 2^-l. Selecting total width n - 1
// makes the Kraft sum exactly 1. Costs never decrease with depth, so the
// cheapest selection takes a prefix of depths for every symbol.
inline std::vector<int> min_linear_penalty_lengths(std::span<const double> probs, const PenaltyWeights& w,
                                                   int max_len) {
    w.validate();
    const std::size_t n = probs.size();
    detail::require_feasible(n, max_len);

    std::vector<detail::PmNode> arena;
    arena.reserve(n * static_cast<std::size_t>(max_len) * 2);
    std::vector<int> carried;  // packages handed up from the level below

    std::vector<int> level_items(n);
    std::vector<int> merged;
    for (int level = max_len; level >= 1; --level) {
        const double unit = w.alpha + w.beta * (2.0 * level - 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            arena.push_back({probs[i] * unit, static_cast<int>(i), -1, -1});
            level_items[i] = static_cast<int>(arena.size() - 1);
        }
        std::stable_sort(level_items.begin(), level_items.end(),
                         [&](int a, int b) { return arena[a].cost < arena[b].cost; });

        // Items win cost ties against packages.
        merged.clear();
        merged.reserve(level_items.size() + carried.size());
        std::size_t a = 0, b = 0;
        while (a < level_items.size() || b < carried.size()) {
            if (b == carried.size() ||
                (a < level_items.size() && arena[level_items[a]].cost <= arena[carried[b]].cost))
                merged.push_back(level_items[a++]);
            else
                merged.push_back(carried[b++]);
        }

        if (level == 1) break;
        carried.clear();
        for (std::size_t k = 0; k + 1 < merged.size(); k += 2) {
            const double c = arena[merged[k]].cost + arena[merged[k + 1]].cost;
            arena.push_back({c, -1, merged[k], merged[k + 1]});
            carried.push_back(static_cast<int>(arena.size() - 1));
        }
    }

    const std::size_t take = 2 * (n - 1);
    if (merged.size() < take) throw FeasibilityError("Package-Merge ran out of coins");

    std::vector<int> lengths(n, 0);
    std::vector<int> stack;
    for (std::size_t k = 0; k < take; ++k) {
        stack.push_back(merged[k]);
        while (!stack.empty()) {
            const auto& node = arena[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            if (node.symbol >= 0) {
                ++lengths[static_cast<std::size_t>(node.symbol)];
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }
    if (std::any_of(lengths.begin(), lengths.end(), [](int l) { return l < 1; }) || kraft_compare(lengths) != 0)
        throw FeasibilityError("Package-Merge produced an incomplete code");
    return detail::assign_sorted(probs, std::move(lengths));
}

inline std::vector<int> min_linear_penalty_lengths(const SourcePMF& pmf, const PenaltyWeights& w,
                                                   std::optional<int> max_len = std::nullopt) {
    return min_linear_penalty_lengths(pmf.probs(), w, max_len.value_or(default_max_len(pmf)));
}

// Canonical code: symbols sorted by (length, list position) receive
// lexicographically increasing codewords.
inline Codebook canonical_assign(std::span<const std::string> symbols, std::span<const int> lengths) {
    if (symbols.size() != lengths.size()) throw AlignmentError("length vector does not match the alphabet size");
    if (kraft_compare(lengths) > 0) throw FeasibilityError("lengths violate the Kraft inequality");

    std::vector<std::size_t> order(symbols.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });

    std::vector<std::string> codewords(symbols.size());
    std::string code;  // next codeword, grown to the current length
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto len = static_cast<std::size_t>(lengths[order[k]]);
        if (code.empty()) code.assign(len, '0');
        else code.resize(len, '0');
        codewords[order[k]] = code;
        // binary increment
        std::size_t pos = code.size();
        while (pos > 0 && code[pos - 1] == '1') code[--pos] = '0';
        if (pos > 0) code[pos - 1] = '1';
        else code.clear();  // overflow only after the last codeword of a complete code
    }
    return Codebook(std::vector<std::string>(symbols.begin(), symbols.end()), std::move(codewords));
}

inline Codebook canonical_assign(const SourcePMF& pmf, std::span<const int> lengths) {
    return canonical_assign(pmf.symbols(), lengths);
}

struct BoundaryCode {
    std::vector<int> lengths;  // aligned with the source order
    CodeMoments moments;
};

namespace detail {

inline BoundaryCode solve_boundary_point(std::span<const double> probs, PenaltyWeights w, int max_len) {
    const double scale = w.alpha + w.beta;
    w.alpha /= scale;
    w.beta /= scale;
    BoundaryCode c;
    c.lengths = min_linear_penalty_lengths(probs, w, max_len);
    c.moments = moments(probs, c.lengths);
    return c;
}

inline std::vector<int> multiset_key(std::vector<int> lengths) {
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

// Cross product of (b - a) x (c - a) in the (E[L], E[L^2]) plane.
inline double turn(const CodeMoments& a, const CodeMoments& b, const CodeMoments& c) {
    return (b.mean_len - a.mean_len) * (c.second_moment - a.second_moment) -
           (b.second_moment - a.second_moment) * (c.mean_len - a.mean_len);
}

// Keeps the strictly convex lower-left chain: E[L] ascending, E[L^2]
// strictly descending, every interior point a strict left turn.
inline std::vector<BoundaryCode> lower_left_chain(std::vector<BoundaryCode> pts) {
    std::sort(pts.begin(), pts.end(), [](const BoundaryCode& a, const BoundaryCode& b) {
        if (a.moments.mean_len != b.moments.mean_len) return a.moments.mean_len < b.moments.mean_len;
        return a.moments.second_moment < b.moments.second_moment;
    });
    std::vector<BoundaryCode> hull;
    for (auto& p : pts) {
        if (!hull.empty() && p.moments.second_moment >= hull.back().moments.second_moment) continue;
        while (hull.size() >= 2) {
            const double cr = turn(hull[hull.size() - 2].moments, hull.back().moments, p.moments);
            const double mag = std::abs(hull.back().moments.second_moment) + std::abs(p.moments.second_moment) + 1.0;
            if (cr > kHullRelativeTolerance * mag) break;
            hull.pop_back();
        }
        hull.push_back(std::move(p));
    }
    return hull;
}

} // namespace detail

// Every length multiset on the lower-left boundary of the (E[L], E[L^2])
// hull, sorted by E[L] ascending.
//
// Starts from the (1,0) and (0,1) extremes. For adjacent codes E1, E2 the
// weights alpha = E[L^2](E1) - E[L^2](E2), beta = E[L](E2) - E[L](E1) make
// both endpoints score equally; a code scoring strictly lower splits the
// segment and both halves are searched again.
inline std::vector<BoundaryCode> boundary_codes(std::span<const double> probs, int max_len) {
    detail::require_feasible(probs.size(), max_len);

    std::vector<BoundaryCode> found;
    std::set<std::vector<int>> seen;
    auto remember = [&](const BoundaryCode& c) {
        if (seen.insert(detail::multiset_key(c.lengths)).second) found.push_back(c);
    };

    const auto left = detail::solve_boundary_point(probs, {1.0, 0.0}, max_len);
    const auto right = detail::solve_boundary_point(probs, {0.0, 1.0}, max_len);
    remember(left);
    remember(right);

    std::vector<std::pair<BoundaryCode, BoundaryCode>> work;
    work.emplace_back(left, right);
    while (!work.empty()) {
        auto [e1, e2] = std::move(work.back());
        work.pop_back();
        const double alpha = e1.moments.second_moment - e2.moments.second_moment;
        const double beta = e2.moments.mean_len - e1.moments.mean_len;
        if (!(alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0)) continue;
        const PenaltyWeights w{alpha, beta};
        auto e3 = detail::solve_boundary_point(probs, w, max_len);
        const double seg = penalty(e1.moments, w);
        const double cand = penalty(e3.moments, w);
        if (!(cand < seg - kHullRelativeTolerance * std::abs(seg))) continue;
        remember(e3);
        work.emplace_back(e3, e2);
        work.emplace_back(e1, e3);
    }
    return detail::lower_left_chain(std::move(found));
}

inline std::vector<BoundaryCode> boundary_codes(const SourcePMF& pmf, std::optional<int> max_len = std::nullopt) {
    return boundary_codes(pmf.probs(), max_len.value_or(default_max_len(pmf)));
}

// Scores a boundary code; +infinity marks codes that cannot be used.
using CodeScore = std::function<double(const CodeMoments&)>;

inline CodeScore ideal_paoi_score(double q) {
    return [q](const CodeMoments& m) {
        return is_stable(q, m) ? paoi_ideal(q, m) : std::numeric_limits<double>::infinity();
    };
}

inline CodeScore naive_paoi_score(double q) {
    return [q](const CodeMoments& m) {
        return is_stable_naive(q, m) ? paoi_naive(q, m) : std::numeric_limits<double>::infinity();
    };
}

// Lowest-scoring boundary code; ties go to the smaller E[L].
inline BoundaryCode select_on_boundary(const std::vector<BoundaryCode>& chain, const CodeScore& score, double q,
                                       double service_offset = 0.0) {
    const BoundaryCode* best = nullptr;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& c : chain) {
        const double s = score(c.moments);
        if (!std::isfinite(s)) continue;
        if (best == nullptr || s < best_score - 1e-12 * std::abs(best_score)) {
            best = &c;
            best_score = s;
        }
    }
    if (best == nullptr) {
        const double min_len = chain.empty() ? 0.0 : chain.front().moments.mean_len;
        throw InstabilityError(min_len + service_offset, 1.0 / q,
                               "no stable code: minimum achievable E[L]=" + text::format_double(min_len) +
                                   (service_offset > 0.0 ? " (+" + text::format_double(service_offset) + " framing)" : "") +
                                   " but 1/q=" + text::format_double(1.0 / q));
    }
    return *best;
}

// Boundary code minimizing the ideal-signaling peak age at arrival rate q.
inline BoundaryCode age_optimal_lengths(std::span<const double> probs, double q, int max_len) {
    return select_on_boundary(boundary_codes(probs, max_len), ideal_paoi_score(q), q);
}

inline Codebook age_optimal_code(const SourcePMF& pmf, const ArrivalSpec& arrival,
                                 std::optional<int> max_len = std::nullopt) {
    const auto best = age_optimal_lengths(pmf.probs(), arrival.q(), max_len.value_or(default_max_len(pmf)));
    return canonical_assign(pmf, best.lengths);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle for small alphabets.

inline constexpr std::size_t kOracleMaxSymbols = 8;
inline constexpr int kOracleMaxLen = 8;

// Every nondecreasing length vector of size n with lengths <= max_len and
// Kraft sum exactly 1.
inline std::vector<std::vector<int>> complete_length_multisets(std::size_t n, int max_len) {
    if (n > kOracleMaxSymbols || max_len > kOracleMaxLen)
        throw OracleTooLargeError("exhaustive enumeration limited to n <= 8 and max_len <= 8");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    const std::int64_t full = std::int64_t{1} << max_len;
    // budget in units of 2^-max_len
    std::function<void(int, std::int64_t)> rec = [&](int min_len, std::int64_t used) {
        if (cur.size() == n) {
            if (used == full) out.push_back(cur);
            return;
        }
        const auto remaining = static_cast<std::int64_t>(n - cur.size());
        for (int l = min_len; l <= max_len; ++l) {
            const std::int64_t w = std::int64_t{1} << (max_len - l);
            // all later lengths are >= l, so each uses at most w
            if (used + w > full) continue;
            if (used + remaining * w < full) break;
            cur.push_back(l);
            rec(l, used + w);
            cur.pop_back();
        }
    };
    rec(1, 0);
    return out;
}

// Exhaustive minimizer of score over complete codes; lengths are assigned
// shortest-to-likeliest. Returns the first minimizer in enumeration order.
inline std::vector<int> brute_force_optimal_lengths(std::span<const double> probs, const CodeScore& score,
                                                    int max_len) {
    if (probs.size() > kOracleMaxSymbols || max_len > kOracleMaxLen)
        throw OracleTooLargeError("exhaustive enumeration limited to n <= 8 and max_len <= 8");
    std::vector<int> best;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& ms : complete_length_multisets(probs.size(), max_len)) {
        auto lengths = detail::assign_sorted(probs, ms);
        const double s = score(moments(probs, lengths));
        if (s < best_score) {
            best_score = s;
            best = std::move(lengths);
        }
    }
    if (best.empty()) throw InstabilityError(0.0, 0.0, "no complete code has a finite score");
    return best;
}

inline CodeScore penalty_score(const PenaltyWeights& w) {
    return [w](const CodeMoments& m) { return penalty(m, w); };
}

// ---------------------------------------------------------------------------
// Codebook text format: `<identifier> <codeword-bits>` per line, '#' headers.

inline std::string serialize_codebook(const Codebook& cb, const std::optional<CodeMoments>& m = std::nullopt,
                                      const std::vector<std::string>& extra_headers = {}) {
    std::string out = "# codebook symbols=" + std::to_string(cb.size()) + '\n';
    for (const auto& h : extra_headers) out += "# " + h + '\n';
    if (m) {
        out += "# mean_len=" + text::format_double(m->mean_len) + '\n';
        out += "# second_moment=" + text::format_double(m->second_moment) + '\n';
    }
    for (std::size_t i = 0; i < cb.size(); ++i) out += cb.symbol(i) + ' ' + cb.codeword(i) + '\n';
    return out;
}

struct ParsedCodebook {
    Codebook codebook;
    std::map<std::string, std::string> headers;  // `# key=value` lines
};

// With validate=false the prefix/Kraft checks are skipped so that broken
// fixtures can be loaded and diagnosed.
inline ParsedCodebook parse_codebook(std::string_view content, bool validate = true) {
    std::vector<std::string> symbols, codewords;
    std::map<std::string, std::string> headers;
    std::size_t lineno = 0;
    for (auto line : text::lines(content)) {
        ++lineno;
        line = text::trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            for (auto f : text::fields(line.substr(1))) {
                const auto eq = f.find('=');
                if (eq != std::string_view::npos) headers[std::string(f.substr(0, eq))] = std::string(f.substr(eq + 1));
            }
            continue;
        }
        auto f = text::fields(line);
        if (f.size() != 2)
            throw ParseError("codebook line " + std::to_string(lineno) + ": expected '<identifier> <codeword>'");
        symbols.emplace_back(f[0]);
        codewords.emplace_back(f[1]);
    }
    Codebook cb(std::move(symbols), std::move(codewords));
    if (validate) {
        if (!cb.is_prefix_free()) throw FeasibilityError("codebook is not prefix-free");
        if (kraft_compare(cb.lengths()) > 0) throw FeasibilityError("codebook violates the Kraft inequality");
    }
    return {std::move(cb), std::move(headers)};
}

} // namespace aoicode
