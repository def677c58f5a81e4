#pragma once
// decoder.hpp - bit-at-a-time prefix-code decoder for every framing scheme

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "coding.hpp"
#include "errors.hpp"
#include "schemes.hpp"

namespace aoicode {

// Binary trie over a prefix-free codebook. Leaves carry the codebook index.
class PrefixDecoder {
public:
    explicit PrefixDecoder(const Codebook& cb) {
        nodes_.push_back({});
        for (std::size_t i = 0; i < cb.size(); ++i) {
            int cur = 0;
            for (char c : cb.codeword(i)) {
                if (nodes_[cur].leaf >= 0) throw FeasibilityError("codebook is not prefix-free");
                const int b = c == '1' ? 1 : 0;
                if (nodes_[cur].child[b] < 0) {
                    nodes_[cur].child[b] = static_cast<int>(nodes_.size());
                    nodes_.push_back({});
                }
                cur = nodes_[cur].child[b];
            }
            if (nodes_[cur].leaf >= 0 || nodes_[cur].child[0] >= 0 || nodes_[cur].child[1] >= 0)
                throw FeasibilityError("codebook is not prefix-free");
            nodes_[cur].leaf = static_cast<int>(i);
        }
    }

    // Consumes one bit; returns the codebook index when a codeword completes.
    std::optional<std::size_t> push(char bit) {
        const int next = nodes_[state_].child[bit == '1' ? 1 : 0];
        if (next < 0) throw ParseError("bit stream left the code tree");
        if (nodes_[next].leaf >= 0) {
            state_ = 0;
            return static_cast<std::size_t>(nodes_[next].leaf);
        }
        state_ = next;
        return std::nullopt;
    }

    bool at_boundary() const noexcept { return state_ == 0; }

private:
    struct Node {
        int child[2] = {-1, -1};
        int leaf = -1;
    };
    std::vector<Node> nodes_;
    int state_ = 0;
};

// Parses an emitted channel stream ('0', '1', '-' for the free empty signal)
// back into message indices of the scheme's message codebook. A trailing
// partial codeword is ignored.
inline std::vector<std::size_t> decode_stream(const SchemeSpec& scheme, std::string_view stream) {
    std::vector<std::size_t> out;
    switch (scheme.kind) {
    case SchemeKind::Ideal: {
        PrefixDecoder dec(scheme.message_codebook);
        for (char c : stream) {
            if (c == '-') {
                if (!dec.at_boundary()) throw ParseError("empty-buffer signal inside a codeword");
                continue;
            }
            if (auto s = dec.push(c)) out.push_back(*s);
        }
        break;
    }
    case SchemeKind::Naive: {
        PrefixDecoder dec(scheme.message_codebook);
        bool in_message = false;
        for (char c : stream) {
            if (c == '-') throw ParseError("naive stream cannot carry the free empty signal");
            if (!in_message) {
                in_message = c == '1';  // '0' alone is the idle marker
                continue;
            }
            if (auto s = dec.push(c)) {
                out.push_back(*s);
                in_message = false;
            }
        }
        break;
    }
    case SchemeKind::Predictive:
    case SchemeKind::Adaptive: {
        const auto all = scheme.union_codebook();
        const std::size_t null_index = all.size() - 1;
        PrefixDecoder dec(all);
        for (char c : stream) {
            if (c == '-') throw ParseError("null-codeword stream cannot carry the free empty signal");
            if (auto s = dec.push(c); s && *s != null_index) out.push_back(*s);
        }
        break;
    }
    }
    return out;
}

} // namespace aoicode
