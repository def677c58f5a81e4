#pragma once
// code_moments.hpp - first and second moments of codeword length

#include <cstddef>
#include <span>

#include "errors.hpp"
#include "source_model.hpp"

namespace aoicode {

struct CodeMoments {
    double mean_len = 0.0;       // E[L], bits
    double second_moment = 0.0;  // E[L^2], bits^2

    friend bool operator==(const CodeMoments&, const CodeMoments&) = default;
};

inline CodeMoments moments(std::span<const double> probs, std::span<const int> lengths) {
    if (probs.size() != lengths.size())
        throw AlignmentError("length vector does not match the alphabet size");
    CodeMoments m;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double l = lengths[i];
        m.mean_len += probs[i] * l;
        m.second_moment += probs[i] * l * l;
    }
    return m;
}

inline CodeMoments moments(const SourcePMF& pmf, std::span<const int> lengths) {
    return moments(pmf.probs(), lengths);
}

} // namespace aoicode
