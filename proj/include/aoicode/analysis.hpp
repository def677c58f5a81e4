#pragma once
// analysis.hpp - closed-form peak-age results for the Geo/G/1 bit pipe
//
// A symbol is a job whose service time is its codeword length at one bit per
// slot. With Bernoulli(q) arrivals the pipe is a discrete-time Geo/G/1 queue,
// and the k-th age peak is W_k + S_k + Y_k (wait, service, interarrival).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "code_moments.hpp"
#include "errors.hpp"
#include "text.hpp"

namespace aoicode {

// Stable iff E[L] < 1/q. The boundary itself is unstable.
inline bool is_stable(double q, const CodeMoments& m) {
    return q > 0.0 && m.mean_len < 1.0 / q;
}

namespace detail {
inline void require_stable(double q, const CodeMoments& m, const char* what) {
    if (!is_stable(q, m))
        throw InstabilityError(m.mean_len, 1.0 / q,
                               std::string(what) + ": unstable, E[L]=" + text::format_double(m.mean_len) +
                                   " >= 1/q=" + text::format_double(1.0 / q));
}

// Moments of L + 1, the on-wire length with a one-bit flag.
inline CodeMoments flagged(const CodeMoments& m) {
    return {m.mean_len + 1.0, m.second_moment + 2.0 * m.mean_len + 1.0};
}
} // namespace detail

// Mean Geo/G/1 waiting time (E[L^2] - E[L]) / (2 (1/q - E[L])).
inline double expected_waiting(double q, const CodeMoments& m) {
    detail::require_stable(q, m, "expected_waiting");
    return (m.second_moment - m.mean_len) / (2.0 * (1.0 / q - m.mean_len));
}

// Average peak age with free empty-buffer signaling: E[W] + E[L] + 1/q.
inline double paoi_ideal(double q, const CodeMoments& m) {
    detail::require_stable(q, m, "paoi_ideal");
    return expected_waiting(q, m) + m.mean_len + 1.0 / q;
}

inline bool is_stable_naive(double q, const CodeMoments& m) {
    return is_stable(q, detail::flagged(m));
}

// Average peak age when every codeword carries a leading flag bit and an idle
// slot sends a lone 0:
//   (E[L^2] + E[L]) / (2 (1/q - E[L] - 1)) + E[L] + 1 + 1/q.
inline double paoi_naive(double q, const CodeMoments& m) {
    detail::require_stable(q, detail::flagged(m), "paoi_naive");
    return (m.second_moment + m.mean_len) / (2.0 * (1.0 / q - m.mean_len - 1.0)) + m.mean_len + 1.0 +
           1.0 / q;
}

struct OptimalRate {
    double q_star = 0.0;
    double paoi = 0.0;
    // False when the unconstrained optimum lands at q* >= 1, which no
    // Bernoulli source can realise; clamped_q then reports q = 1.
    bool feasible = true;
    double clamped_q = 0.0;
};

// Minimizer of paoi_ideal over z = 1/q:
//   1/q* = sqrt((E[L^2] - E[L]) / 2) + E[L],  PAoI(q*) = sqrt(2 (E[L^2] - E[L])) + 2 E[L].
inline OptimalRate optimal_arrival_rate(const CodeMoments& m) {
    const double spread = std::max(0.0, m.second_moment - m.mean_len);
    OptimalRate r;
    r.q_star = 1.0 / (std::sqrt(spread / 2.0) + m.mean_len);
    r.paoi = std::sqrt(2.0 * spread) + 2.0 * m.mean_len;
    r.feasible = r.q_star < 1.0;
    r.clamped_q = r.feasible ? r.q_star : 1.0;
    return r;
}

struct AnalyticReport {
    double q = 0.0;
    CodeMoments moments;
    bool stable = false;
    double load = 0.0;          // rho = q E[L]
    double waiting = std::numeric_limits<double>::quiet_NaN();
    double service = 0.0;       // E[S] = E[L]
    double interarrival = 0.0;  // E[Y] = 1/q
    double paoi = std::numeric_limits<double>::quiet_NaN();
    std::optional<OptimalRate> q_star;
};

// Ideal-signaling report. Unstable inputs yield stable=false with NaN
// waiting/paoi rather than an exception.
inline AnalyticReport analyze(double q, const CodeMoments& m) {
    AnalyticReport r;
    r.q = q;
    r.moments = m;
    r.load = q * m.mean_len;
    r.service = m.mean_len;
    r.interarrival = 1.0 / q;
    r.q_star = optimal_arrival_rate(m);
    r.stable = is_stable(q, m);
    if (r.stable) {
        r.waiting = expected_waiting(q, m);
        r.paoi = r.waiting + r.service + r.interarrival;
    }
    return r;
}

} // namespace aoicode
