#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "aoicode/coding.hpp"
#include "test_support.hpp"

using namespace aoicode;
using aoicode::testing::abcd;
using aoicode::testing::random_pmf;

namespace {

// Independent lower-left hull oracle (gift wrapping): start at the point with
// least E[L] (then least E[L^2]) and repeatedly step to the point with smaller
// E[L^2] reached along the steepest descending slope, farthest on ties.
std::vector<CodeMoments> gift_wrap_boundary(const std::vector<CodeMoments>& pts) {
    auto start = *std::min_element(pts.begin(), pts.end(), [](const CodeMoments& a, const CodeMoments& b) {
        return a.mean_len != b.mean_len ? a.mean_len < b.mean_len : a.second_moment < b.second_moment;
    });
    std::vector<CodeMoments> chain{start};
    while (true) {
        const auto& p = chain.back();
        const CodeMoments* next = nullptr;
        double best_slope = 0.0;
        for (const auto& c : pts) {
            if (!(c.second_moment < p.second_moment - 1e-12) || !(c.mean_len > p.mean_len + 1e-12)) continue;
            const double slope = (c.second_moment - p.second_moment) / (c.mean_len - p.mean_len);
            if (next == nullptr || slope < best_slope - 1e-12 ||
                (std::abs(slope - best_slope) <= 1e-12 && c.mean_len > next->mean_len)) {
                next = &c;
                best_slope = slope;
            }
        }
        if (next == nullptr) break;
        chain.push_back(*next);
    }
    return chain;
}

std::vector<CodeMoments> all_code_moments(std::span<const double> probs, int max_len) {
    std::vector<CodeMoments> out;
    for (const auto& ms : complete_length_multisets(probs.size(), max_len))
        out.push_back(moments(probs, detail::assign_sorted(probs, ms)));
    return out;
}

double pm_penalty(std::span<const double> probs, std::span<const int> l, const PenaltyWeights& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) s += probs[i] * (w.alpha * l[i] + w.beta * l[i] * l[i]);
    return s;
}

} // namespace

TEST(KraftSum, Examples) {
    EXPECT_DOUBLE_EQ(kraft_sum(std::vector<int>{1, 2, 3, 3}), 1.0);
    EXPECT_DOUBLE_EQ(kraft_sum(std::vector<int>{1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(kraft_sum(std::vector<int>{2, 2, 2}), 0.75);
}

TEST(KraftCompare, ExactAgainstOne) {
    EXPECT_EQ(kraft_compare(std::vector<int>{1, 2, 3, 3}), 0);
    EXPECT_EQ(kraft_compare(std::vector<int>{2, 2, 2}), -1);
    EXPECT_EQ(kraft_compare(std::vector<int>{1, 1, 2}), 1);
    EXPECT_EQ(kraft_compare(std::vector<int>{1, 2, 2, 70}), 1);
    std::vector<int> deep;
    for (int l = 1; l <= 99; ++l) deep.push_back(l);
    deep.push_back(99);
    EXPECT_EQ(kraft_compare(deep), 0);
    deep.back() = 100;
    EXPECT_EQ(kraft_compare(deep), -1);
}

TEST(Moments, Examples) {
    const auto u4 = uniform_pmf(4);
    EXPECT_EQ(moments(u4, std::vector<int>{2, 2, 2, 2}), (CodeMoments{2.0, 4.0}));
    const auto m = moments(abcd(0.5, 0.25, 0.125, 0.125), std::vector<int>{1, 2, 3, 3});
    EXPECT_DOUBLE_EQ(m.mean_len, 1.75);
    EXPECT_DOUBLE_EQ(m.second_moment, 3.75);

    std::vector<int> huff20(20, 4);
    std::fill(huff20.begin() + 12, huff20.end(), 5);
    const auto m20 = moments(uniform_pmf(20), huff20);
    EXPECT_NEAR(m20.mean_len, 4.4, 1e-12);
    EXPECT_NEAR(m20.second_moment, 19.6, 1e-12);
    EXPECT_THROW(moments(u4, std::vector<int>{1, 2}), AlignmentError);
}

TEST(PackageMerge, HuffmanOnDyadicSource) {
    const auto pmf = abcd(0.5, 0.25, 0.125, 0.125);
    EXPECT_EQ(min_linear_penalty_lengths(pmf, {1.0, 0.0}), (std::vector<int>{1, 2, 3, 3}));
    const auto oracle = brute_force_optimal_lengths(pmf.probs(), penalty_score({1.0, 0.0}), 4);
    EXPECT_EQ(oracle, (std::vector<int>{1, 2, 3, 3}));
}

TEST(PackageMerge, BalancedOnUniformFour) {
    const auto pmf = uniform_pmf(4);
    EXPECT_EQ(min_linear_penalty_lengths(pmf, {1.0, 0.0}), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_EQ(min_linear_penalty_lengths(pmf, {0.0, 1.0}), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_EQ(brute_force_optimal_lengths(pmf.probs(), penalty_score({0.0, 1.0}), 4), (std::vector<int>{2, 2, 2, 2}));
}

TEST(PackageMerge, LengthLimitRespected) {
    const auto pmf = zipf_pmf(16, 2.0);
    const auto unlimited = min_linear_penalty_lengths(pmf, {1.0, 0.0});
    EXPECT_GT(*std::max_element(unlimited.begin(), unlimited.end()), 5);
    const auto limited = min_linear_penalty_lengths(pmf.probs(), {1.0, 0.0}, 5);
    EXPECT_LE(*std::max_element(limited.begin(), limited.end()), 5);
    EXPECT_EQ(kraft_compare(limited), 0);
    EXPECT_THROW(min_linear_penalty_lengths(pmf.probs(), {1.0, 0.0}, 3), FeasibilityError);
    EXPECT_THROW(min_linear_penalty_lengths(pmf.probs(), {0.0, 0.0}, 8), ConfigError);
}

TEST(PackageMerge, MeanLengthMatchesBruteForceOnRandomSources) {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const auto pmf = random_pmf(rng, n);
        const int max_len = n - 1;
        const auto pm = min_linear_penalty_lengths(pmf, {1.0, 0.0});
        const auto bf = brute_force_optimal_lengths(pmf.probs(), penalty_score({1.0, 0.0}), max_len);
        EXPECT_NEAR(moments(pmf, pm).mean_len, moments(pmf, bf).mean_len, 1e-12) << "trial " << trial;
        EXPECT_GE(moments(pmf, pm).mean_len, entropy(pmf) - 1e-12);
    }
}

TEST(PackageMerge, PenaltyMatchesBruteForceForRandomWeights) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const auto pmf = random_pmf(rng, n);
        const int max_len = std::max(min_feasible_max_len(static_cast<std::size_t>(n)), 1 + static_cast<int>(rng() % 6));
        PenaltyWeights w{unit(rng), unit(rng)};
        const auto pm = min_linear_penalty_lengths(pmf.probs(), w, max_len);
        const auto bf = brute_force_optimal_lengths(pmf.probs(), penalty_score(w), max_len);
        EXPECT_NEAR(pm_penalty(pmf.probs(), pm, w), pm_penalty(pmf.probs(), bf, w), 1e-12) << "trial " << trial;
    }
}

TEST(PackageMerge, ScaleInvariantArgmin) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pmf = random_pmf(rng, 6);
        const PenaltyWeights w{unit(rng), unit(rng)};
        auto base = min_linear_penalty_lengths(pmf, w);
        for (double c : {0.001, 3.0, 1000.0}) {
            auto scaled = min_linear_penalty_lengths(pmf, {w.alpha * c, w.beta * c});
            std::sort(base.begin(), base.end());
            std::sort(scaled.begin(), scaled.end());
            EXPECT_EQ(base, scaled);
        }
    }
}

TEST(CanonicalAssign, FourSymbolCode) {
    const auto cb = canonical_assign(abcd(0.5, 0.25, 0.125, 0.125), std::vector<int>{1, 2, 3, 3});
    EXPECT_EQ(cb.codeword_of("A"), "0");
    EXPECT_EQ(cb.codeword_of("B"), "10");
    EXPECT_EQ(cb.codeword_of("C"), "110");
    EXPECT_EQ(cb.codeword_of("D"), "111");
}

TEST(CanonicalAssign, TwoSymbols) {
    const std::vector<std::string> syms{"A", "B"};
    const auto cb = canonical_assign(syms, std::vector<int>{1, 1});
    EXPECT_EQ(cb.codeword(0), "0");
    EXPECT_EQ(cb.codeword(1), "1");
}

TEST(CanonicalAssign, NullSymbolMidOrder) {
    const std::vector<std::string> syms{"A", "B", "NULL", "C", "D"};
    const auto cb = canonical_assign(syms, std::vector<int>{1, 3, 3, 3, 3});
    EXPECT_EQ(cb.codewords()[0], "0");
    EXPECT_EQ(cb.codewords()[1], "100");
    EXPECT_EQ(cb.codewords()[2], "101");
    EXPECT_EQ(cb.codewords()[3], "110");
    EXPECT_EQ(cb.codewords()[4], "111");
}

TEST(CanonicalAssign, RejectsKraftViolation) {
    const std::vector<std::string> syms{"A", "B", "C"};
    EXPECT_THROW(canonical_assign(syms, std::vector<int>{1, 1, 2}), FeasibilityError);
    const auto partial = canonical_assign(syms, std::vector<int>{2, 2, 2});
    EXPECT_TRUE(partial.is_prefix_free());
}

TEST(CanonicalAssign, EmittedCodesArePrefixFreeAndComplete) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 30);
        const auto pmf = random_pmf(rng, n);
        const auto cb = canonical_assign(pmf, min_linear_penalty_lengths(pmf, {0.3, 0.7}));
        EXPECT_TRUE(cb.is_prefix_free());
        EXPECT_EQ(kraft_compare(cb.lengths()), 0);
    }
}

TEST(BoundaryCodes, UniformFourIsSinglePoint) {
    const auto chain = boundary_codes(uniform_pmf(4));
    ASSERT_EQ(chain.size(), 1u);
    EXPECT_EQ(chain[0].moments, (CodeMoments{2.0, 4.0}));
}

TEST(BoundaryCodes, DyadicSourceMatchesExhaustiveHull) {
    const auto pmf = abcd(0.5, 0.25, 0.125, 0.125);
    const auto chain = boundary_codes(pmf.probs(), 4);
    const auto oracle = gift_wrap_boundary(all_code_moments(pmf.probs(), 4));
    ASSERT_EQ(chain.size(), oracle.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        EXPECT_NEAR(chain[i].moments.mean_len, oracle[i].mean_len, 1e-12);
        EXPECT_NEAR(chain[i].moments.second_moment, oracle[i].second_moment, 1e-12);
    }
    EXPECT_EQ(chain.front().moments, (CodeMoments{1.75, 3.75}));
}

TEST(BoundaryCodes, RandomSourcesMatchExhaustiveHull) {
    std::mt19937_64 rng(314);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const auto pmf = random_pmf(rng, n);
        const int max_len = n - 1;
        const auto chain = boundary_codes(pmf.probs(), max_len);
        const auto oracle = gift_wrap_boundary(all_code_moments(pmf.probs(), max_len));
        ASSERT_EQ(chain.size(), oracle.size()) << "trial " << trial;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            EXPECT_NEAR(chain[i].moments.mean_len, oracle[i].mean_len, 1e-12);
            EXPECT_NEAR(chain[i].moments.second_moment, oracle[i].second_moment, 1e-12);
        }
    }
}

// For a uniform source moments depend only on how many codewords sit at each
// depth, so the hull can be enumerated over depth-count vectors.
TEST(BoundaryCodes, UniformTwentyMatchesDepthCountHull) {
    const int n = 20, max_len = 6;
    std::vector<CodeMoments> pts;
    std::vector<int> count(max_len + 1, 0);
    std::function<void(int, int, int)> rec = [&](int depth, int left, int used) {
        // used: Kraft sum in units of 2^-max_len
        if (depth > max_len) {
            if (left == 0 && used == (1 << max_len)) {
                CodeMoments m;
                for (int l = 1; l <= max_len; ++l) {
                    m.mean_len += count[l] * l / 20.0;
                    m.second_moment += count[l] * l * l / 20.0;
                }
                pts.push_back(m);
            }
            return;
        }
        for (int c = 0; c <= left; ++c) {
            const int w = c << (max_len - depth);
            if (used + w > (1 << max_len)) break;
            count[depth] = c;
            rec(depth + 1, left - c, used + w);
        }
        count[depth] = 0;
    };
    rec(1, n, 0);
    const auto oracle = gift_wrap_boundary(pts);
    const auto chain = boundary_codes(uniform_pmf(n).probs(), max_len);
    ASSERT_EQ(chain.size(), oracle.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        EXPECT_NEAR(chain[i].moments.mean_len, oracle[i].mean_len, 1e-12);
        EXPECT_NEAR(chain[i].moments.second_moment, oracle[i].second_moment, 1e-12);
    }
    const bool has_huffman = std::any_of(chain.begin(), chain.end(), [](const BoundaryCode& c) {
        return std::abs(c.moments.mean_len - 4.4) < 1e-12 && std::abs(c.moments.second_moment - 19.6) < 1e-12;
    });
    EXPECT_TRUE(has_huffman);
}

TEST(BoundaryCodes, LowerConvexChain) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        const auto pmf = random_pmf(rng, 3 + static_cast<int>(rng() % 40));
        const auto chain = boundary_codes(pmf);
        for (std::size_t i = 1; i < chain.size(); ++i) {
            EXPECT_LT(chain[i - 1].moments.mean_len, chain[i].moments.mean_len);
            EXPECT_GT(chain[i - 1].moments.second_moment, chain[i].moments.second_moment);
        }
        for (std::size_t i = 2; i < chain.size(); ++i)
            EXPECT_GT(detail::turn(chain[i - 2].moments, chain[i - 1].moments, chain[i].moments), 0.0);
        for (const auto& c : chain) {
            EXPECT_EQ(kraft_compare(c.lengths), 0);
            EXPECT_GE(c.moments.mean_len, entropy(pmf) - 1e-12);
            EXPECT_GE(c.moments.second_moment, c.moments.mean_len * c.moments.mean_len - 1e-9);
        }
    }
}

TEST(AgeOptimalCode, UniformFourBalanced) {
    const auto pmf = uniform_pmf(4);
    const auto cb = age_optimal_code(pmf, ArrivalSpec(0.25));
    EXPECT_EQ(cb.lengths(), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_DOUBLE_EQ(paoi_ideal(0.25, moments(pmf, cb.lengths())), 6.5);
}

TEST(AgeOptimalCode, InstabilityCarriesMinimumLength) {
    try {
        age_optimal_code(uniform_pmf(4), ArrivalSpec(0.6));
        FAIL() << "expected instability";
    } catch (const InstabilityError& e) {
        EXPECT_DOUBLE_EQ(e.mean_len(), 2.0);
        EXPECT_NEAR(e.inv_q(), 1.0 / 0.6, 1e-15);
    }
}

TEST(AgeOptimalCode, DyadicSourceMatchesBruteForce) {
    const auto pmf = abcd(0.5, 0.25, 0.125, 0.125);
    const double q = 0.4;
    const auto best = age_optimal_lengths(pmf.probs(), q, 3);
    const auto bf = brute_force_optimal_lengths(pmf.probs(), ideal_paoi_score(q), 3);
    EXPECT_NEAR(paoi_ideal(q, best.moments), paoi_ideal(q, moments(pmf, bf)), 1e-12);
}

TEST(AgeOptimalCode, MatchesBruteForceOnRandomSources) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const auto pmf = random_pmf(rng, n);
        const int max_len = n - 1;
        const double huff = moments(pmf, min_linear_penalty_lengths(pmf, {1.0, 0.0})).mean_len;
        const double q = frac(rng) / huff;
        const auto best = age_optimal_lengths(pmf.probs(), q, max_len);
        const auto bf = brute_force_optimal_lengths(pmf.probs(), ideal_paoi_score(q), max_len);
        EXPECT_NEAR(paoi_ideal(q, best.moments), paoi_ideal(q, moments(pmf, bf)), 1e-9) << "trial " << trial;
    }
}

TEST(AgeOptimalCode, NeverWorseThanHuffman) {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> frac(0.05, 0.98);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pmf = random_pmf(rng, 2 + static_cast<int>(rng() % 20));
        const auto huff = moments(pmf, min_linear_penalty_lengths(pmf, {1.0, 0.0}));
        const double q = frac(rng) / huff.mean_len;
        const auto cb = age_optimal_code(pmf, ArrivalSpec(q));
        EXPECT_LE(paoi_ideal(q, moments(pmf, cb.lengths())), paoi_ideal(q, huff) + 1e-12);
    }
}

TEST(BruteForce, Examples) {
    const auto u4 = uniform_pmf(4);
    EXPECT_EQ(brute_force_optimal_lengths(u4.probs(), penalty_score({1.0, 0.0}), 3), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_EQ(brute_force_optimal_lengths(u4.probs(), ideal_paoi_score(0.25), 3), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_THROW(brute_force_optimal_lengths(uniform_pmf(9).probs(), penalty_score({1.0, 0.0}), 8),
                 OracleTooLargeError);
    EXPECT_THROW(complete_length_multisets(4, 9), OracleTooLargeError);
}

TEST(CompleteLengthMultisets, SmallCounts) {
    // n=3: {1,2,2}; n=4: {1,2,3,3}, {2,2,2,2}
    EXPECT_EQ(complete_length_multisets(3, 2).size(), 1u);
    EXPECT_EQ(complete_length_multisets(4, 3).size(), 2u);
    for (const auto& ms : complete_length_multisets(7, 6)) EXPECT_EQ(kraft_compare(ms), 0);
}

TEST(CodebookText, RoundTripAndHeaders) {
    const auto pmf = abcd(0.5, 0.25, 0.125, 0.125);
    const std::vector<int> lens{1, 2, 3, 3};
    const auto cb = canonical_assign(pmf, lens);
    const auto text = serialize_codebook(cb, moments(pmf, lens));
    EXPECT_NE(text.find("# mean_len=1.75"), std::string::npos);
    EXPECT_NE(text.find("# second_moment=3.75"), std::string::npos);
    const auto parsed = parse_codebook(text);
    EXPECT_EQ(parsed.codebook, cb);
    EXPECT_EQ(parsed.headers.at("mean_len"), "1.75");
}

TEST(CodebookText, RejectsBrokenCodes) {
    EXPECT_THROW(parse_codebook("A 0\nB 01\n"), FeasibilityError);
    EXPECT_THROW(parse_codebook("A 0\nB 1\nC 11\n"), FeasibilityError);
    EXPECT_THROW(parse_codebook("A 0\nB 2\n"), ParseError);
    EXPECT_NO_THROW(parse_codebook("A 0\nB 01\n", false));
}
