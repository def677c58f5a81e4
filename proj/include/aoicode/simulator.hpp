#pragma once
// simulator.hpp - slot-exact simulation of source -> encoder -> FIFO bit pipe -> decoder
//
// Slot t covers (t, t+1]. At integer t an arrival (if any) joins the buffer,
// then the framing layer picks the bit sent during the slot. A codeword whose
// last bit is sent in (t, t+1] is decoded at t+1; the age then drops to
// (t+1) minus the symbol's arrival slot.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "schemes.hpp"
#include "source_model.hpp"
#include "text.hpp"

namespace aoicode {

// A run is flagged divergent once the post-warmup message backlog peaks above
// this many mean wire lengths.
inline constexpr double kDivergenceFactor = 100.0;

struct ScriptedArrival {
    std::int64_t slot = 0;
    std::string symbol;
};

struct SimConfig {
    SchemeSpec scheme;
    std::optional<SourcePMF> source;  // drives random symbol draws
    double q = 0.0;                   // per-slot arrival probability (random mode)
    std::int64_t horizon = 0;
    std::int64_t warmup = 0;
    std::uint64_t seed = 1;
    std::int64_t initial_age = 1;
    std::optional<std::vector<ScriptedArrival>> scripted_arrivals;
};

inline std::int64_t default_warmup(const SchemeSpec& scheme) {
    return std::max<std::int64_t>(10'000, 100 * scheme.max_wire_length());
}

struct SimStats {
    double empirical_paoi = std::numeric_limits<double>::quiet_NaN();
    double mean_age = 0.0;
    double idle_fraction = 0.0;
    double mean_wait = std::numeric_limits<double>::quiet_NaN();
    double mean_service = std::numeric_limits<double>::quiet_NaN();
    double mean_interarrival = std::numeric_limits<double>::quiet_NaN();
    std::int64_t peaks_count = 0;
    std::int64_t decoded_count = 0;
    std::int64_t arrivals_count = 0;
    std::int64_t in_flight = 0;            // queued or in service at the horizon
    std::int64_t final_pending_bits = 0;
    std::int64_t max_pending_bits = 0;     // post-warmup peak backlog
    std::int64_t switches = 0;             // adaptive preemptions
    bool diverged = false;
};

struct SlotRecord {
    std::int64_t t = 0;
    std::int64_t pending_bits = 0;  // message bits buffered after the arrival at t
    char bit = '-';                 // '0', '1', or '-' for the free empty signal
    std::optional<std::size_t> decoded;  // message index decoded at t
    std::int64_t age = 0;
    std::int64_t u = 0;
    std::int64_t arrivals = 0;      // N(t)
};

struct Delivery {
    std::size_t symbol = 0;  // message codebook index
    std::int64_t arrival = 0;
    std::int64_t service_start = 0;
    std::int64_t decode = 0;
};

struct Trace {
    std::vector<std::string> symbols;  // message codebook identifiers
    std::vector<SlotRecord> slots;
    std::vector<Delivery> deliveries;
    std::vector<std::size_t> arrival_sequence;
    std::int64_t warmup = 0;
    std::int64_t switches = 0;

    std::string channel_stream() const {
        std::string s;
        s.reserve(slots.size());
        for (const auto& r : slots) s.push_back(r.bit);
        return s;
    }
};

namespace detail {

inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline std::mt19937_64 derive_stream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

} // namespace detail

// Slot-by-slot engine shared by run() and run_trace().
class StreamSimulator {
public:
    explicit StreamSimulator(const SimConfig& cfg) : cfg_(cfg) {
        cfg_.scheme.validate();
        const auto& cb = cfg_.scheme.message_codebook;
        for (std::size_t i = 0; i < cb.size(); ++i) wire_.push_back(cfg_.scheme.wire_bits(i));
        if (cfg_.scheme.kind == SchemeKind::Naive) null_bits_ = "0";
        else if (cfg_.scheme.null_codeword) null_bits_ = *cfg_.scheme.null_codeword;

        if (cfg_.horizon <= 0 || cfg_.warmup < 0 || cfg_.warmup >= cfg_.horizon)
            throw ConfigError("need 0 <= warmup < horizon");
        if (cfg_.horizon < 10 * static_cast<std::int64_t>(cfg_.scheme.max_wire_length()))
            throw ConfigError("horizon must cover at least 10 maximal codewords");

        if (cfg_.scripted_arrivals) {
            std::int64_t last = std::numeric_limits<std::int64_t>::min();
            for (const auto& a : *cfg_.scripted_arrivals) {
                if (a.slot < 0 || a.slot < last) throw ConfigError("scripted arrivals must be sorted by slot");
                last = a.slot;
                const auto idx = cb.index_of(a.symbol);
                if (idx == cb.size()) throw ConfigError("scripted symbol '" + a.symbol + "' not in codebook");
                script_.push_back({a.slot, idx});
            }
            double total = 0.0;
            for (const auto& w : wire_) total += static_cast<double>(w.size());
            mean_wire_ = total / static_cast<double>(wire_.size());
        } else {
            if (!cfg_.source) throw ConfigError("random arrivals need a source distribution");
            if (!(cfg_.q > 0.0 && cfg_.q < 1.0)) throw ConfigError("arrival probability must lie in (0, 1)");
            double cum = 0.0;
            mean_wire_ = 0.0;
            for (std::size_t i = 0; i < cfg_.source->size(); ++i) {
                const auto idx = cb.index_of(cfg_.source->symbol(i));
                if (idx == cb.size())
                    throw ConfigError("source symbol '" + cfg_.source->symbol(i) + "' has no codeword");
                cum += cfg_.source->prob(i);
                cdf_.push_back(cum);
                draw_map_.push_back(idx);
                mean_wire_ += cfg_.source->prob(i) * static_cast<double>(wire_[idx].size());
            }
            arrival_rng_ = detail::derive_stream(cfg_.seed, 1);
            symbol_rng_ = detail::derive_stream(cfg_.seed, 2);
        }
        u_ = -cfg_.initial_age;
    }

    std::int64_t now() const noexcept { return t_; }
    bool done() const noexcept { return t_ >= cfg_.horizon; }
    double divergence_threshold() const noexcept { return kDivergenceFactor * mean_wire_; }

    // Advances one slot and returns its record; newly completed deliveries
    // are appended to `deliveries`.
    SlotRecord step(std::vector<Delivery>& deliveries, std::vector<std::size_t>* arrivals_out = nullptr) {
        SlotRecord rec;
        rec.t = t_;

        if (decode_due_) {
            const auto& d = *decode_due_;
            rec.decoded = d.symbol;
            u_ = d.arrival;
            deliveries.push_back(d);
            decode_due_.reset();
        }
        rec.age = t_ - u_;
        rec.u = u_;

        // (1) arrival
        auto admit = [&](std::size_t idx) {
            queue_.push_back({idx, t_});
            pending_bits_ += static_cast<std::int64_t>(wire_[idx].size());
            ++arrivals_;
            if (arrivals_out) arrivals_out->push_back(idx);
        };
        if (cfg_.scripted_arrivals) {
            while (script_pos_ < script_.size() && script_[script_pos_].first == t_) admit(script_[script_pos_++].second);
        } else if (detail::unit_uniform(arrival_rng_) < cfg_.q) {
            const double x = detail::unit_uniform(symbol_rng_);
            auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
            admit(draw_map_[k]);
        }
        rec.arrivals = arrivals_;
        rec.pending_bits = pending_bits_;

        // (2) framing: preemption of an in-flight null codeword
        if (mode_ == Mode::Null && cfg_.scheme.preemptible && !queue_.empty()) {
            const auto& head = queue_.front();
            const auto& target = wire_[head.symbol];
            if (pos_ < target.size() && target.compare(0, pos_, null_bits_, 0, pos_) == 0) {
                begin_message(head.symbol, head.arrival);
                queue_.pop_front();
                pending_bits_ -= static_cast<std::int64_t>(pos_);
                ++switches_;
            }
        }
        if (mode_ == Mode::Idle) {
            if (!queue_.empty()) {
                const auto head = queue_.front();
                queue_.pop_front();
                begin_message(head.symbol, head.arrival);
                pos_ = 0;
            } else if (!null_bits_.empty()) {
                mode_ = Mode::Null;
                bits_ = &null_bits_;
                pos_ = 0;
            }
        }

        // (3) emit one bit over (t, t+1]
        if (mode_ == Mode::Idle) {
            rec.bit = '-';
        } else {
            rec.bit = (*bits_)[pos_++];
            if (mode_ == Mode::Message) --pending_bits_;
            if (pos_ == bits_->size()) {
                if (mode_ == Mode::Message) decode_due_ = Delivery{current_symbol_, current_arrival_, service_start_, t_ + 1};
                mode_ = Mode::Idle;
                bits_ = nullptr;
                pos_ = 0;
            }
        }
        ++t_;
        return rec;
    }

    // Delivers a decode completed in the final slot (time == horizon).
    void flush(std::vector<Delivery>& deliveries) {
        if (decode_due_) {
            u_ = decode_due_->arrival;
            deliveries.push_back(*decode_due_);
            decode_due_.reset();
        }
    }

    std::int64_t arrivals() const noexcept { return arrivals_; }
    std::int64_t pending_bits() const noexcept { return pending_bits_; }
    std::int64_t switches() const noexcept { return switches_; }
    std::int64_t in_flight() const noexcept {
        return static_cast<std::int64_t>(queue_.size()) + (mode_ == Mode::Message ? 1 : 0);
    }
    const std::vector<std::string>& wire() const noexcept { return wire_; }

private:
    enum class Mode { Idle, Message, Null };
    struct Queued {
        std::size_t symbol;
        std::int64_t arrival;
    };

    void begin_message(std::size_t symbol, std::int64_t arrival) {
        mode_ = Mode::Message;
        bits_ = &wire_[symbol];
        current_symbol_ = symbol;
        current_arrival_ = arrival;
        service_start_ = t_;
    }

    SimConfig cfg_;
    std::vector<std::string> wire_;
    std::string null_bits_;
    std::vector<std::pair<std::int64_t, std::size_t>> script_;
    std::size_t script_pos_ = 0;
    std::vector<double> cdf_;
    std::vector<std::size_t> draw_map_;
    double mean_wire_ = 1.0;
    std::mt19937_64 arrival_rng_;
    std::mt19937_64 symbol_rng_;

    std::int64_t t_ = 0;
    std::int64_t u_ = 0;
    std::deque<Queued> queue_;
    std::int64_t pending_bits_ = 0;
    std::int64_t arrivals_ = 0;
    std::int64_t switches_ = 0;
    Mode mode_ = Mode::Idle;
    const std::string* bits_ = nullptr;
    std::size_t pos_ = 0;
    std::size_t current_symbol_ = 0;
    std::int64_t current_arrival_ = 0;
    std::int64_t service_start_ = 0;
    std::optional<Delivery> decode_due_;
};

namespace detail {

// Running sums for the per-symbol peak decomposition. A peak counts only if
// its whole interval (previous arrival .. decode) lies after the warmup.
struct PeakAccumulator {
    std::int64_t warmup = 0;
    std::optional<std::int64_t> prev_arrival;
    double peaks = 0.0, wait = 0.0, service = 0.0, inter = 0.0;
    std::int64_t count = 0;

    void add(const Delivery& d) {
        if (prev_arrival && *prev_arrival >= warmup) {
            peaks += static_cast<double>(d.decode - *prev_arrival);
            wait += static_cast<double>(d.service_start - d.arrival);
            service += static_cast<double>(d.decode - d.service_start);
            inter += static_cast<double>(d.arrival - *prev_arrival);
            ++count;
        }
        prev_arrival = d.arrival;
    }
};

} // namespace detail

inline SimStats run(const SimConfig& cfg) {
    StreamSimulator sim(cfg);
    SimStats st;
    detail::PeakAccumulator acc;
    acc.warmup = cfg.warmup;
    std::vector<Delivery> batch;
    double age_sum = 0.0;
    std::int64_t idle = 0, counted = 0;
    while (!sim.done()) {
        const auto rec = sim.step(batch);
        for (const auto& d : batch) acc.add(d);
        st.decoded_count += static_cast<std::int64_t>(batch.size());
        batch.clear();
        if (rec.t >= cfg.warmup) {
            age_sum += static_cast<double>(rec.age);
            if (rec.pending_bits == 0) ++idle;
            st.max_pending_bits = std::max(st.max_pending_bits, rec.pending_bits);
            ++counted;
        }
    }
    sim.flush(batch);
    for (const auto& d : batch) acc.add(d);
    st.decoded_count += static_cast<std::int64_t>(batch.size());

    st.mean_age = age_sum / static_cast<double>(counted);
    st.idle_fraction = static_cast<double>(idle) / static_cast<double>(counted);
    st.peaks_count = acc.count;
    if (acc.count > 0) {
        const auto k = static_cast<double>(acc.count);
        st.empirical_paoi = acc.peaks / k;
        st.mean_wait = acc.wait / k;
        st.mean_service = acc.service / k;
        st.mean_interarrival = acc.inter / k;
    }
    st.arrivals_count = sim.arrivals();
    st.in_flight = sim.in_flight();
    st.final_pending_bits = sim.pending_bits();
    st.switches = sim.switches();
    st.diverged = static_cast<double>(st.max_pending_bits) > sim.divergence_threshold();
    return st;
}

inline Trace run_trace(const SimConfig& cfg) {
    StreamSimulator sim(cfg);
    Trace tr;
    tr.symbols.assign(cfg.scheme.message_codebook.symbols().begin(), cfg.scheme.message_codebook.symbols().end());
    tr.warmup = cfg.warmup;
    tr.slots.reserve(static_cast<std::size_t>(cfg.horizon));
    while (!sim.done()) tr.slots.push_back(sim.step(tr.deliveries, &tr.arrival_sequence));
    sim.flush(tr.deliveries);
    tr.switches = sim.switches();
    return tr;
}

struct EmpiricalMoments {
    double mean_wait = 0.0;
    double mean_service = 0.0;
    double mean_interarrival = 0.0;
    double mean_peak = 0.0;
    std::int64_t samples = 0;
};

// Sample means of W_k, S_k, Y_k over post-warmup peaks.
inline EmpiricalMoments empirical_moments(const Trace& trace) {
    detail::PeakAccumulator acc;
    acc.warmup = trace.warmup;
    for (const auto& d : trace.deliveries) acc.add(d);
    if (acc.count == 0) throw EmptySampleError("no complete age peak after the warmup");
    const auto k = static_cast<double>(acc.count);
    return {acc.wait / k, acc.service / k, acc.inter / k, acc.peaks / k, acc.count};
}

// Fraction of post-warmup slots with no message bits buffered.
inline double idle_fraction(const Trace& trace) {
    std::int64_t idle = 0, counted = 0;
    for (const auto& r : trace.slots) {
        if (r.t < trace.warmup) continue;
        ++counted;
        if (r.pending_bits == 0) ++idle;
    }
    if (counted == 0) throw ConfigError("trace has no slots after the warmup");
    return static_cast<double>(idle) / static_cast<double>(counted);
}

// CSV columns t,pending_bits,bit,decoded,age,u,N.
inline std::string trace_csv(const Trace& trace) {
    std::string out = "t,pending_bits,bit,decoded,age,u,N\n";
    for (const auto& r : trace.slots) {
        out += std::to_string(r.t);
        out += ',';
        out += std::to_string(r.pending_bits);
        out += ',';
        out += r.bit;
        out += ',';
        if (r.decoded) out += trace.symbols[*r.decoded];
        out += ',';
        out += std::to_string(r.age);
        out += ',';
        out += std::to_string(r.u);
        out += ',';
        out += std::to_string(r.arrivals);
        out += '\n';
    }
    return out;
}

// Scripted arrivals CSV: `slot,symbol` per line, optional header.
inline std::vector<ScriptedArrival> parse_scripted_arrivals(std::string_view content) {
    std::vector<ScriptedArrival> out;
    std::size_t lineno = 0;
    for (auto line : text::lines(content)) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto parts = text::split(line, ',');
        if (parts.size() != 2) throw ParseError("arrivals line " + std::to_string(lineno) + ": expected slot,symbol");
        if (lineno == 1 && text::trim(parts[0]) == "slot") continue;
        out.push_back({text::parse_int(parts[0], "slot"), std::string(text::trim(parts[1]))});
    }
    return out;
}

inline std::string stats_csv_header() {
    return "empirical_paoi,mean_age,idle_fraction,mean_wait,mean_service,mean_interarrival,peaks_count,"
           "decoded_count,arrivals_count,switches,max_pending_bits,diverged\n";
}

inline std::string stats_csv_row(const SimStats& s) {
    using text::format_double;
    return format_double(s.empirical_paoi) + ',' + format_double(s.mean_age) + ',' + format_double(s.idle_fraction) +
           ',' + format_double(s.mean_wait) + ',' + format_double(s.mean_service) + ',' +
           format_double(s.mean_interarrival) + ',' + std::to_string(s.peaks_count) + ',' +
           std::to_string(s.decoded_count) + ',' + std::to_string(s.arrivals_count) + ',' +
           std::to_string(s.switches) + ',' + std::to_string(s.max_pending_bits) + ',' +
           (s.diverged ? "true" : "false") + '\n';
}

} // namespace aoicode
