#pragma once
// Shared generators for property-style tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "aoicode/source_model.hpp"

namespace aoicode::testing {

// Random PMF with weights drawn from [0.05, 1) and normalized.
inline SourcePMF random_pmf(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    std::vector<double> w(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (auto& x : w) {
        x = weight(rng);
        sum += x;
    }
    std::vector<std::string> syms;
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] /= sum;
        syms.push_back("s" + std::to_string(i));
    }
    return SourcePMF(std::move(syms), std::move(w));
}

// Four symbols A..D with the given probabilities.
inline SourcePMF abcd(double a, double b, double c, double d) {
    return SourcePMF({"A", "B", "C", "D"}, {a, b, c, d});
}

} // namespace aoicode::testing
