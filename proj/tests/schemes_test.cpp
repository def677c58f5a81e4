#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "aoicode/decoder.hpp"
#include "aoicode/schemes.hpp"
#include "test_support.hpp"

using namespace aoicode;
using aoicode::testing::abcd;

namespace {

SchemeSpec null_scheme_abcd() {
    SchemeSpec s;
    s.kind = SchemeKind::Predictive;
    s.message_codebook = Codebook({"A", "B", "C", "D"}, {"0", "100", "110", "111"});
    s.null_codeword = "101";
    s.null_prob_used = 0.25;
    return s;
}

} // namespace

TEST(BuildIdeal, DyadicSourceGetsFourSymbolCode) {
    const auto s = build_ideal(abcd(0.5, 0.25, 0.125, 0.125), ArrivalSpec(0.05));
    EXPECT_EQ(s.kind, SchemeKind::Ideal);
    EXPECT_FALSE(s.has_null());
    EXPECT_EQ(s.message_codebook.codeword_of("A"), "0");
    EXPECT_EQ(s.message_codebook.codeword_of("B"), "10");
    EXPECT_EQ(s.message_codebook.codeword_of("C"), "110");
    EXPECT_EQ(s.message_codebook.codeword_of("D"), "111");
}

TEST(BuildIdeal, UniformSources) {
    const auto s4 = build_ideal(uniform_pmf(4), ArrivalSpec(0.25));
    EXPECT_EQ(s4.message_codebook.codewords()[0], "00");
    EXPECT_EQ(s4.message_codebook.codewords()[3], "11");

    const auto s20 = build_ideal(uniform_pmf(20), ArrivalSpec(0.15));
    auto lens = s20.message_codebook.lengths();
    EXPECT_EQ(std::count(lens.begin(), lens.end(), 4), 12);
    EXPECT_EQ(std::count(lens.begin(), lens.end(), 5), 8);
    EXPECT_THROW(build_ideal(uniform_pmf(4), ArrivalSpec(0.6)), InstabilityError);
}

TEST(BuildNaive, FlagBitFraming) {
    const auto s = build_naive(abcd(0.5, 0.25, 0.125, 0.125), ArrivalSpec(0.05));
    EXPECT_EQ(s.kind, SchemeKind::Naive);
    EXPECT_EQ(s.wire_bits(s.message_codebook.index_of("C")), "1110");
    EXPECT_EQ(s.wire_bits(s.message_codebook.index_of("A")), "10");
    EXPECT_FALSE(s.has_null());
}

TEST(BuildNaive, StabilityUsesFlaggedLength) {
    const auto pmf = uniform_pmf(4);
    const auto s = build_naive(pmf, ArrivalSpec(0.2));
    EXPECT_NEAR(paoi_naive(0.2, moments(pmf, s.message_codebook.lengths())), 9.5, 1e-12);
    // ideal-stable (2 < 3) but naive-unstable (3 == 3)
    EXPECT_THROW(build_naive(pmf, ArrivalSpec(1.0 / 3.0)), InstabilityError);
}

TEST(BuildNaive, ReoptimizeToggleNeverHurts) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto pmf = aoicode::testing::random_pmf(rng, 10);
        const double q = 0.12;
        SchemeSpec plain, tuned;
        try {
            plain = build_naive(pmf, ArrivalSpec(q));
        } catch (const InstabilityError&) {
            continue;
        }
        tuned = build_naive(pmf, ArrivalSpec(q), std::nullopt, {.reoptimize = true});
        EXPECT_LE(paoi_naive(q, moments(pmf, tuned.message_codebook.lengths())),
                  paoi_naive(q, moments(pmf, plain.message_codebook.lengths())) + 1e-12);
    }
}

TEST(BuildPredictive, UniformFourNullProbability) {
    const auto pmf = uniform_pmf(4);
    const auto s = build_predictive(pmf, ArrivalSpec(0.25));
    ASSERT_TRUE(s.null_prob_used.has_value());
    EXPECT_DOUBLE_EQ(*s.null_prob_used, 0.5);
    const auto aug = augment_with_null(pmf, 0.5);
    EXPECT_EQ(aug.symbol(0), "NULL");
    EXPECT_DOUBLE_EQ(aug.prob(0), 0.5);
    for (std::size_t i = 1; i < aug.size(); ++i) EXPECT_DOUBLE_EQ(aug.prob(i), 0.125);
    EXPECT_NO_THROW(s.validate());
    const auto all = s.union_codebook();
    EXPECT_TRUE(all.is_prefix_free());
    EXPECT_EQ(kraft_compare(all.lengths()), 0);
}

TEST(BuildPredictive, LightLoadGivesOneBitNull) {
    for (const auto& pmf : {uniform_pmf(20), zipf_pmf(20, 1.0), uniform_pmf(4)}) {
        const auto s = build_predictive(pmf, ArrivalSpec(0.01));
        ASSERT_TRUE(s.null_codeword.has_value());
        EXPECT_EQ(s.null_codeword->size(), 1u);
        EXPECT_GT(*s.null_prob_used, 0.9);
    }
}

TEST(BuildPredictive, UnionCodeCompleteAcrossLoads) {
    for (double q : {0.02, 0.08, 0.14, 0.2, 0.22}) {
        const auto s = build_predictive(uniform_pmf(20), ArrivalSpec(q));
        EXPECT_NO_THROW(s.validate()) << q;
        EXPECT_NEAR(*s.null_prob_used, 1.0 - q * 4.4, 1e-12) << q;
    }
}

TEST(BuildPredictive, OverloadRejected) {
    EXPECT_THROW(build_predictive(uniform_pmf(4), ArrivalSpec(0.5)), InstabilityError);
}

TEST(SchemeSpec, NullCodewordLayoutIsValid) {
    EXPECT_NO_THROW(null_scheme_abcd().validate());
    auto broken = null_scheme_abcd();
    broken.null_codeword = "10";
    EXPECT_THROW(broken.validate(), FeasibilityError);
    auto incomplete = null_scheme_abcd();
    incomplete.message_codebook = Codebook({"A", "B", "C", "D"}, {"0", "100", "110", "1110"});
    EXPECT_THROW(incomplete.validate(), FeasibilityError);
    auto ideal_with_null = null_scheme_abcd();
    ideal_with_null.kind = SchemeKind::Ideal;
    EXPECT_THROW(ideal_with_null.validate(), ConfigError);
}

TEST(BuildAdaptive, RequiresNullCodeword) {
    const auto a = build_adaptive(null_scheme_abcd());
    EXPECT_EQ(a.kind, SchemeKind::Adaptive);
    EXPECT_TRUE(a.preemptible);
    EXPECT_EQ(a.null_codeword, null_scheme_abcd().null_codeword);
    EXPECT_NO_THROW(a.validate());
    EXPECT_THROW(build_adaptive(build_ideal(uniform_pmf(4), ArrivalSpec(0.25))), ConfigError);
}

TEST(SchemeText, RoundTrip) {
    for (const auto& s : {null_scheme_abcd(), build_adaptive(null_scheme_abcd()),
                          build_naive(uniform_pmf(4), ArrivalSpec(0.2)), build_ideal(zipf_pmf(20, 1.0), ArrivalSpec(0.1))}) {
        const auto text = serialize_scheme(s);
        const auto back = parse_scheme(text);
        EXPECT_EQ(back.kind, s.kind);
        EXPECT_EQ(back.message_codebook, s.message_codebook);
        EXPECT_EQ(back.null_codeword, s.null_codeword);
        EXPECT_EQ(back.null_prob_used, s.null_prob_used);
        EXPECT_EQ(back.preemptible, s.preemptible);
    }
    const auto text = serialize_scheme(null_scheme_abcd());
    EXPECT_NE(text.find("# scheme=predictive"), std::string::npos);
    EXPECT_NE(text.find("# p_null=0.25"), std::string::npos);
    EXPECT_NE(text.find("NULL 101"), std::string::npos);
}

TEST(Decoder, NaiveStreamParsesUniquely) {
    const auto s = build_naive(abcd(0.5, 0.25, 0.125, 0.125), ArrivalSpec(0.05));
    // C, idle, idle, A, D
    const std::string stream = "1110" "0" "0" "10" "1111";
    const auto out = decode_stream(s, stream);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(s.message_codebook.symbol(out[0]), "C");
    EXPECT_EQ(s.message_codebook.symbol(out[1]), "A");
    EXPECT_EQ(s.message_codebook.symbol(out[2]), "D");
}

TEST(Decoder, NullCodewordsDropped) {
    const auto s = null_scheme_abcd();
    const auto out = decode_stream(s, "101" "100" "101" "0" "10");
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(s.message_codebook.symbol(out[0]), "B");
    EXPECT_EQ(s.message_codebook.symbol(out[1]), "A");
    EXPECT_THROW(decode_stream(s, "10-1"), ParseError);
}
