#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fibstat/korovkin.hpp"
#include "oracles.hpp"

using namespace fibstat;

namespace {

constexpr std::size_t kM = 1024;
// Node index of x = pi/2 on the grid x_j = -pi + 2 pi j / M.
constexpr std::size_t kHalfPi = 3 * kM / 4;

GridFunction random_nonnegative(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> a(8);
    std::vector<double> b(8);
    for (std::size_t h = 0; h < a.size(); ++h) {
        a[h] = coef(rng);
        b[h] = coef(rng);
    }
    GridFunction f = sample_function(
        [&](double x) {
            double v = 0.0;
            for (std::size_t h = 0; h < a.size(); ++h) {
                v += a[h] * std::cos(static_cast<double>(h) * x) + b[h] * std::sin(static_cast<double>(h) * x);
            }
            return v;
        },
        kM);
    for (double& v : f.samples) {
        v = std::abs(v);
    }
    return f;
}

}  // namespace

TEST(Grid, SupNorms) {
    EXPECT_EQ(sup_norm_2pi(target_function("sin", kM)), 1.0);
    EXPECT_EQ(sup_norm_2pi(target_function("cos", kM)), 1.0);
    EXPECT_EQ(sup_norm_2pi(constant_function(-3.0, kM)), 3.0);
    EXPECT_NEAR(sup_norm_2pi(target_function("abs-sin-smoothed", kM)), std::sqrt(1.01), 1e-15);
    EXPECT_EQ(target_function("sin", kM)[kHalfPi], 1.0);
    EXPECT_THROW(target_function("tan", kM), DomainError);
    EXPECT_THROW(constant_function(1.0, 1000), DomainError);
}

TEST(Fourier, PartialSums) {
    const GridFunction s = target_function("sin", kM);
    EXPECT_LE(sup_norm_2pi(fourier_partial_sum(s, 1) - s), 1e-14);
    EXPECT_LE(sup_norm_2pi(fourier_partial_sum(s, 0)), 1e-15);
    const GridFunction c3 = harmonic(3, false, kM);
    EXPECT_LE(sup_norm_2pi(fourier_partial_sum(c3, 2)), 1e-14);
    EXPECT_LE(sup_norm_2pi(fourier_partial_sum(c3, 3) - c3), 1e-14);
    const GridFunction one = constant_function(1.0, kM);
    EXPECT_EQ(sup_norm_2pi(fourier_partial_sum(one, 5) - one), 0.0);
    EXPECT_THROW(fourier_partial_sum(s, kM / 2), DomainError);
}

TEST(Fejer, MeansOfHarmonics) {
    const GridFunction s = target_function("sin", kM);
    EXPECT_NEAR(fejer_mean(s, 4)[kHalfPi], 0.8, 1e-15);
    for (std::size_t k : {1u, 2u, 7u, 63u, 200u}) {
        EXPECT_NEAR(sup_norm_2pi(fejer_mean(s, k) - s), oracle::fejer_sine_error(k), 1e-13) << k;
    }
    const GridFunction one = constant_function(1.0, kM);
    EXPECT_EQ(sup_norm_2pi(fejer_mean(one, 10) - one), 0.0);
    EXPECT_NEAR(fejer_kernel(3, 0.0), 4.0, 0.0);
}

TEST(Fejer, SquaredSineErrors) {
    const GridFunction s2 = target_function("sin2", kM);
    double previous = 1.0;
    for (std::size_t k = 1; k <= 128; ++k) {
        const double e = sup_norm_2pi(fejer_mean(s2, k) - s2);
        EXPECT_NEAR(e, 1.0 / static_cast<double>(k + 1), 1e-13) << k;
        EXPECT_LE(e, previous + 1e-15);
        previous = e;
    }
}

TEST(Fejer, AverageMatchesKernel) {
    for (const char* name : {"sin2", "abs-sin-smoothed", "sawtooth-smoothed"}) {
        const GridFunction f = target_function(name, kM);
        for (std::size_t n : {1u, 16u, 100u}) {
            const double gap =
                sup_norm_2pi(fejer_mean(f, n, FejerMethod::Average) - fejer_mean(f, n, FejerMethod::Kernel));
            EXPECT_LE(gap, 1e-11) << name << " n=" << n;
        }
    }
}

TEST(Fejer, PositiveOnRandomNonnegativeFunctions) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const GridFunction f = random_nonnegative(rng);
        const std::size_t n = 1 + static_cast<std::size_t>(trial) * 3;
        for (FejerMethod method : {FejerMethod::Average, FejerMethod::Kernel}) {
            if (method == FejerMethod::Kernel && trial % 10 != 0) {
                continue;
            }
            const GridFunction g = fejer_mean(f, n, method);
            EXPECT_GE(*std::min_element(g.samples.begin(), g.samples.end()), -1e-12) << trial;
        }
    }
}

TEST(SecondMoment, Families) {
    for (std::size_t k : {1u, 5u, 50u}) {
        const GridFunction fm = second_moment(fejer_family(), k, kM);
        EXPECT_NEAR(*std::max_element(fm.samples.begin(), fm.samples.end()), oracle::fejer_moment(k), 1e-14);
        const GridFunction id = second_moment(identity_family(), k, kM);
        EXPECT_LE(sup_norm_2pi(id), 1e-15);
    }
    const OperatorFamily kn = paper_example_operator(10);
    const GridFunction m1 = second_moment(kn, 1, kM);
    EXPECT_NEAR(*std::max_element(m1.samples.begin(), m1.samples.end()), 0.5, 1e-14);
    const GridFunction m3 = second_moment(kn, 3, kM);
    // (1 + f_4^2) / (2 * 4)
    EXPECT_NEAR(*std::max_element(m3.samples.begin(), m3.samples.end()), 10.0 / 8.0, 1e-13);
}

TEST(ScaledFejer, Examples) {
    const OperatorFamily kn = paper_example_operator(10);
    const GridFunction k1 = kn(1, constant_function(1.0, kM));
    for (double v : k1.samples) {
        EXPECT_EQ(v, 2.0);
    }
    const GridFunction k2 = kn(2, target_function("sin", kM));
    EXPECT_NEAR(k2[kHalfPi], 5.0 * 2.0 / 3.0, 1e-14);
    EXPECT_EQ(kn.exact_scale(4), Rational(26));
    EXPECT_THROW(kn.exact_scale(11), HorizonError);
    ExactSeqPrefix bad;
    bad.terms = {Rational(-1)};
    bad.horizon = 1;
    EXPECT_THROW(paper_example_operator(bad), DomainError);
}

TEST(SpotCheck, KnownFamilies) {
    for (const OperatorFamily& fam : {fejer_family(), identity_family(), paper_example_operator(40)}) {
        const SpotCheck c = spot_check(fam, 37, kM);
        EXPECT_TRUE(c.linear) << fam.name;
        EXPECT_TRUE(c.positive) << fam.name;
    }
}

TEST(ErrorSequence, ScaledFamilyIsExactForConstants) {
    const OperatorFamily kn = paper_example_operator(120);
    const SeqSample e = error_sequence(kn, constant_function(1.0, kM), 120, "e(1)");
    ASSERT_TRUE(e.exact.has_value());
    const ExactSeqPrefix y = exact_witness(Witness::FibSquares, 120);
    for (std::size_t k = 1; k <= 120; ++k) {
        ASSERT_EQ(e.exact->at(k), y.at(k)) << k;
    }
}

TEST(ClassicalVerdict, Windows) {
    std::vector<double> shrinking(256);
    for (std::size_t k = 1; k <= 256; ++k) shrinking[k - 1] = 1.0 / static_cast<double>(k);
    EXPECT_EQ(classical_verdict(make_prefix("e", shrinking), 256, 0.05).verdict, Convergence::Convergent);
    EXPECT_EQ(classical_verdict(make_prefix("e", std::vector<double>(256, 1.0)), 256, 0.05).verdict,
              Convergence::Divergent);
}

TEST(KorovkinAudit, FejerConvergesEverywhere) {
    const FibCache cache = build_fib_cache(200);
    const KorovkinReport r = korovkin_audit(fejer_family(), {{"sin2", target_function("sin2", kM)}}, 128, cache);
    ASSERT_EQ(r.records.size(), 4u);
    EXPECT_EQ(r.records[0].function, "1");
    EXPECT_EQ(r.records[3].function, "sin2");
    for (const auto& rec : r.records) {
        for (const char* mode : {"classical", "statistical", "fib-statistical"}) {
            EXPECT_EQ(rec.verdict(mode), Convergence::Convergent) << rec.function << " " << mode;
        }
    }
    ASSERT_EQ(r.implications.size(), 3u);
    for (const auto& c : r.implications) {
        EXPECT_TRUE(c.forward_consistent);
        EXPECT_TRUE(c.converse_consistent);
        EXPECT_EQ(c.k0, Convergence::Convergent);
    }
    EXPECT_NEAR(r.record("sin").errors.values.at(128), oracle::fejer_sine_error(128), 1e-13);
}

TEST(KorovkinAudit, ScaledFamilyErrors) {
    const FibCache cache = build_fib_cache(200);
    const KorovkinReport r =
        korovkin_audit(paper_example_operator(128), {{"sin2", target_function("sin2", kM)}}, 128, cache);
    const ErrorRecord& one = r.record("1");
    const SeqPrefix y = witness(Witness::FibSquares, 128);
    for (std::size_t k = 1; k <= 128; ++k) {
        ASSERT_EQ(one.errors.values.at(k), y.at(k)) << k;
    }
    EXPECT_EQ(one.transformed.at(1), 1.0);
    for (std::size_t k = 2; k <= 128; ++k) {
        ASSERT_LE(std::abs(one.transformed.at(k)), 1e-9) << k;
    }
    EXPECT_EQ(one.verdict("fib-statistical"), Convergence::Convergent);
    EXPECT_EQ(one.verdict("classical"), Convergence::Divergent);
    EXPECT_NE(r.record("sin").verdict("fib-statistical"), Convergence::Convergent);
    EXPECT_NE(r.record("cos").verdict("fib-statistical"), Convergence::Convergent);
}

TEST(KorovkinAudit, RejectsNonPositiveFamily) {
    OperatorFamily negate;
    negate.name = "negate";
    negate.apply = [](std::size_t, const GridFunction& f) {
        GridFunction g = f;
        for (double& v : g.samples) v = -v;
        return g;
    };
    const FibCache cache = build_fib_cache(200);
    EXPECT_THROW(korovkin_audit(negate, {}, 128, cache), OperatorCheckError);
}

TEST(KorovkinAudit, RejectsNonlinearFamily) {
    OperatorFamily square;
    square.name = "square";
    square.apply = [](std::size_t, const GridFunction& f) {
        GridFunction g = f;
        for (double& v : g.samples) v = v * v;
        return g;
    };
    const FibCache cache = build_fib_cache(200);
    EXPECT_THROW(korovkin_audit(square, {}, 128, cache), OperatorCheckError);
}

TEST(KorovkinAudit, HorizonChecks) {
    const FibCache cache = build_fib_cache(1000);
    EXPECT_THROW(korovkin_audit(fejer_family(), {}, 99, cache), InvalidHorizon);
    EXPECT_THROW(korovkin_audit(fejer_family(), {}, 512, cache), DomainError);
}
