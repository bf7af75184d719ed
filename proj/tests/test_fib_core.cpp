#include <gtest/gtest.h>

#include <cmath>

#include "fibstat/fib_core.hpp"
#include "oracles.hpp"

using namespace fibstat;

TEST(FibCache, FirstTwelveTerms) {
    const FibCache cache = build_fib_cache(12);
    const std::vector<Integer> terms = cache.terms();
    const long expected[] = {1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144};
    ASSERT_EQ(terms.size(), 12u);
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(terms[i], expected[i]) << "index " << i + 1;
    }
}

TEST(FibCache, BaseCase) {
    const FibCache cache = build_fib_cache(2);
    const auto terms = cache.terms();
    ASSERT_EQ(terms.size(), 2u);
    EXPECT_EQ(terms[0], 1);
    EXPECT_EQ(terms[1], 1);
}

TEST(FibCache, ZeroOneConventionListsFromZero) {
    const FibCache cache = build_fib_cache(5, FibConvention::ZeroOne);
    const auto terms = cache.terms();
    ASSERT_EQ(terms.size(), 5u);
    EXPECT_EQ(terms[0], 0);
    EXPECT_EQ(terms[4], 3);
    EXPECT_EQ(cache.value(1), 1);
    EXPECT_EQ(cache.value(2), 1);
}

TEST(FibCache, NinetiethTerm) {
    const FibCache cache = build_fib_cache(90);
    EXPECT_EQ(cache.value(90), Integer(oracle::kF90));
}

TEST(FibCache, MatchesNativeOracle) {
    const FibCache cache = build_fib_cache(186);
    const auto f = oracle::fibonacci(186);
    for (std::size_t n = 0; n <= 186; ++n) {
        const auto hi = static_cast<std::uint64_t>(f[n] >> 64);
        const auto lo = static_cast<std::uint64_t>(f[n]);
        EXPECT_EQ(cache.value(n), (Integer(hi) << 64) + lo) << "n = " << n;
    }
}

TEST(FibCache, RejectsShortHorizon) {
    EXPECT_THROW(build_fib_cache(1), InvalidHorizon);
    EXPECT_THROW(build_fib_cache(0), InvalidHorizon);
}

TEST(FibCache, ValueBeyondHorizonThrows) {
    const FibCache cache = build_fib_cache(10);
    EXPECT_THROW(cache.value(11), HorizonError);
    EXPECT_THROW(cache.ratio_up(10), HorizonError);
    EXPECT_THROW(cache.ratio_up(0), HorizonError);
}

TEST(Ratios, SmallValues) {
    const RatioSeq r = ratios(build_fib_cache(20));
    EXPECT_EQ(r.at(1), 1.0);
    EXPECT_EQ(r.at(2), 2.0);
    EXPECT_EQ(r.at(3), 1.5);
    EXPECT_EQ(r.at(10), 89.0 / 55.0);
    EXPECT_NEAR(r.at(10), 1.6181818181818182, 1e-15);
}

TEST(Ratios, ConvergeToGoldenRatio) {
    const RatioSeq r = ratios(build_fib_cache(300));
    EXPECT_LE(std::abs(r.at(40) - oracle::kGolden), 1e-12);
    double previous_gap = 1.0;
    for (std::size_t n = 1; n < 300; ++n) {
        EXPECT_GE(r.at(n), 1.0);
        EXPECT_LE(r.at(n), 2.0);
        const double gap = std::abs(r.at(n) - oracle::kGolden);
        EXPECT_LE(gap, previous_gap + 1e-16) << "n = " << n;
        previous_gap = gap;
    }
}

TEST(Ratios, NeedThreeTerms) { EXPECT_THROW(ratios(build_fib_cache(2)), InvalidHorizon); }

TEST(RatioCache, AgreesWithExactCacheAndExtends) {
    const FibCache exact = build_fib_cache(3000);
    const FibCache fast = build_ratio_cache(200000, 128);
    for (std::size_t n = 1; n < 3000; ++n) {
        ASSERT_EQ(exact.ratio_up(n), fast.ratio_up(n)) << n;
        ASSERT_EQ(exact.ratio_down(n), fast.ratio_down(n)) << n;
    }
    EXPECT_EQ(fast.ratio_up(199999), exact.ratio_up(2999));
    EXPECT_EQ(fast.exact_horizon(), 128u);
}

TEST(IdentityAudit, SmallCases) {
    const FibCache cache = build_fib_cache(12);
    // f_4 f_6 - f_5^2 = 24 - 25 = -1 = (-1)^5
    EXPECT_EQ(cache.value(4) * cache.value(6) - cache.value(5) * cache.value(5), -1);
    Integer sum = 0;
    for (std::size_t k = 1; k <= 10; ++k) {
        sum += cache.value(k);
    }
    EXPECT_EQ(sum, 143);
    EXPECT_EQ(cache.value(12) - 1, 143);
    const IdentityReport report = identity_audit(cache);
    EXPECT_EQ(report.recurrence_checks, 11u);
    EXPECT_EQ(report.cassini_checks, 11u);
}

TEST(IdentityAudit, ThreeHundredTerms) {
    const IdentityReport report = identity_audit(build_fib_cache(300));
    EXPECT_EQ(report.horizon, 300u);
    EXPECT_EQ(report.recurrence_checks, 299u);
    EXPECT_EQ(report.cassini_checks, 299u);
    EXPECT_EQ(report.cassini_variant_checks, 300u);
    EXPECT_EQ(report.prefix_sum_checks, 298u);
    EXPECT_NEAR(report.reciprocal_partial_sum, 3.3598856662431775531, 1e-15);
    EXPECT_TRUE(report.reciprocal_cauchy);
}

TEST(IdentityAudit, ReciprocalTailBetweenSixtyAndNinety) {
    const FibCache cache = build_fib_cache(90);
    EXPECT_DOUBLE_EQ(reciprocal_sum(cache, 61, 90), oracle::kReciprocalTail61To90);
}

TEST(IdentityAudit, NeedsFourTerms) { EXPECT_THROW(identity_audit(build_fib_cache(3)), InvalidHorizon); }
