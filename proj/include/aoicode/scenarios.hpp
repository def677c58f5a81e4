#pragma once
// scenarios.hpp - small scripted set-ups with hand-checkable traces
//
// Four symbols A..D coded 0, 10, 110, 111; with a null symbol the code
// becomes A=0, B=100, NULL=101, C=110, D=111.

#include <string>
#include <vector>

#include "schemes.hpp"
#include "simulator.hpp"

namespace aoicode::scenarios {

inline Codebook four_symbol_codebook() {
    return Codebook({"A", "B", "C", "D"}, {"0", "10", "110", "111"});
}

inline SchemeSpec four_symbol_null_scheme(SchemeKind kind = SchemeKind::Predictive) {
    SchemeSpec s;
    s.kind = kind;
    s.message_codebook = Codebook({"A", "B", "C", "D"}, {"0", "100", "110", "111"});
    s.null_codeword = "101";
    s.preemptible = kind == SchemeKind::Adaptive;
    return s;
}

inline SimConfig scripted(SchemeSpec scheme, std::vector<ScriptedArrival> arrivals, std::int64_t horizon = 30) {
    SimConfig cfg;
    cfg.scheme = std::move(scheme);
    cfg.horizon = horizon;
    cfg.warmup = 0;
    cfg.initial_age = 1;
    cfg.scripted_arrivals = std::move(arrivals);
    return cfg;
}

// Free empty signaling; C at 0, B at 2 (queues behind C), A at 8 on an empty buffer.
inline SimConfig ideal_burst() {
    SchemeSpec s;
    s.kind = SchemeKind::Ideal;
    s.message_codebook = four_symbol_codebook();
    return scripted(std::move(s), {{0, "C"}, {2, "B"}, {8, "A"}});
}

// Same arrivals with a null codeword; A arrives while NULL's last bit is on the wire.
inline SimConfig null_deferral() {
    return scripted(four_symbol_null_scheme(SchemeKind::Predictive), {{0, "C"}, {2, "B"}, {8, "A"}});
}

// Empty buffer from 0, NULL=101 in flight; B=100 arrives after "10" was sent.
inline SimConfig null_preemption() {
    return scripted(four_symbol_null_scheme(SchemeKind::Adaptive), {{2, "B"}});
}

} // namespace aoicode::scenarios
