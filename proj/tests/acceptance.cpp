// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "fibstat/cli_runner.hpp"
#include "fibstat/fibstat.hpp"
#include "oracles.hpp"

using namespace fibstat;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << title << " (" << std::fixed
              << std::setprecision(2) << seconds << "s)" << o.detail.str() << std::endl;
}

const std::vector<double> kGrid{0.5, 0.25, 0.1, 0.05};

}  // namespace

int main() {
    criterion(1, "fibonacci integrity", [](Outcome& o) {
        const FibCache cache = build_fib_cache(300);
        const IdentityReport r = identity_audit(cache);
        o.require(r.recurrence_checks == 299 && r.cassini_checks == 299 && r.cassini_variant_checks == 300 &&
                      r.prefix_sum_checks == 298,
                  "identity check counts");
        const auto f = oracle::fibonacci(186);
        for (std::size_t n = 0; n <= 186; ++n) {
            const auto hi = static_cast<std::uint64_t>(f[n] >> 64);
            const auto lo = static_cast<std::uint64_t>(f[n]);
            o.require(cache.value(n) == (Integer(hi) << 64) + lo, "f_" + std::to_string(n) + " vs 128-bit oracle");
        }
        for (std::size_t n = 40; n <= 299; ++n) {
            o.require(std::abs(cache.ratio_up(n) - oracle::kGolden) <= 1e-12, "ratio at " + std::to_string(n));
        }
    });

    criterion(2, "transform fixture", [](Outcome& o) {
        const FibCache cache = build_fib_cache(81);
        const ExactSeqPrefix x = exact_witness(Witness::FibSquares, 80);
        const ExactSeqPrefix exact = exact_fib_difference(x, cache);
        o.require(exact.at(1) == 1, "exact first term");
        for (std::size_t n = 2; n <= 80; ++n) {
            o.require(exact.at(n) == 0, "exact cancellation at " + std::to_string(n));
        }
        const TransformResult t = fib_difference_transform(witness_sample(Witness::FibSquares, 80), cache);
        o.require(t.size() == 80 && t.at(1) == 1.0, "first term");
        for (std::size_t n = 2; n <= t.size(); ++n) {
            o.require(std::abs(t.at(n)) <= 1e-9, "tail at " + std::to_string(n));
        }
    });

    criterion(3, "round trip", [](Outcome& o) {
        const FibCache cache = build_fib_cache(201);
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> dist(-10.0, 10.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> v(200);
            for (double& e : v) e = dist(rng);
            const SeqPrefix x = make_prefix("x", v);
            const SeqPrefix back = approximate(inverse_transform(exact_fib_difference(exact_prefix(x), cache), cache));
            for (std::size_t n = 1; n <= 200; ++n) {
                worst = std::max(worst, std::abs(back.at(n) - x.at(n)) / std::max(1e-300, std::abs(x.at(n))));
            }
        }
        o.require(worst <= 1e-9, "worst relative error " + std::to_string(worst));
    });

    criterion(4, "density oracles", [](Outcome& o) {
        const DensityReport evens = density_estimate(sets::evens(), 1000000);
        o.require(std::abs(evens.point_estimate - 0.5) <= 1e-3, "evens");
        const DensityReport squares = density_estimate(sets::squares(), 1000000);
        o.require(squares.point_estimate == static_cast<double>(oracle::isqrt(1000000)) / 1e6, "squares estimate");
        o.require(squares.verdict == DensityVerdict::Zero, "squares verdict");
        std::mt19937_64 rng(99);
        for (int i = 0; i < 20; ++i) {
            const std::uint64_t mod = 2 + rng() % 50;
            const std::uint64_t mask = rng() | 1;
            IndexSet set{"random", [mod, mask](std::uint64_t k) { return ((mask >> (k % mod)) & 1) != 0; }, {}};
            const std::uint64_t n = 100000;
            const std::uint64_t a = counting_function(set, n);
            const std::uint64_t b = counting_function(sets::complement(set), n);
            std::uint64_t direct = 0;
            for (std::uint64_t k = 1; k <= n; ++k) direct += ((mask >> (k % mod)) & 1) != 0 ? 1 : 0;
            o.require(a + b == n && a == direct, "partition identity for predicate " + std::to_string(i));
        }
    });

    criterion(5, "statistical verdicts", [](Outcome& o) {
        const std::vector<double> half{0.5};
        const StatVerdict cs = stat_limit(witness(Witness::CharSquares, 1000000), half, 1000000);
        o.require(cs.convergent() && cs.limit && *cs.limit == 0.0, "char-squares");
        o.require(stat_limit(witness(Witness::Alt01, 100000), kGrid, 100000).classification == StatClass::Divergent,
                  "alt01");
        const SeqPrefix nsq = witness(Witness::NOnSquares, 100000);
        o.require(admissible_bound(nsq, 0.5, 100000), "n-on-squares admissible 1/2");
        o.require(stat_bounded(nsq, 100000).answer == Tri::Yes, "n-on-squares bounded");
        const FibCache cache = build_ratio_cache(100001, 4200);
        std::vector<SeqSample> corpus;
        for (Witness w : kAllWitnesses) corpus.push_back(witness_sample(w, 100000));
        corpus.push_back(sample_of(constant_sequence(2.0, 100000)));
        const TheoremAuditReport r = theorem_audit(corpus, kGrid, 100000, cache);
        o.require(r.violation_count() == 0, "implication violations " + std::to_string(r.violation_count()));
    });

    criterion(6, "fejer identities", [](Outcome& o) {
        const std::size_t m = 1024;
        const GridFunction s = target_function("sin", m);
        const GridFunction c = target_function("cos", m);
        for (std::size_t k = 1; k <= 64; ++k) {
            const double q = static_cast<double>(k) / static_cast<double>(k + 1);
            o.require(sup_norm_2pi(fejer_mean(s, k) - linear_combination(q, s, 0.0, s)) <= 1e-8, "sin k=" + std::to_string(k));
            o.require(sup_norm_2pi(fejer_mean(c, k) - linear_combination(q, c, 0.0, c)) <= 1e-8, "cos k=" + std::to_string(k));
        }
        for (const char* name : {"sin2", "abs-sin-smoothed", "abs-sin"}) {
            const GridFunction f = target_function(name, m);
            for (std::size_t k : {1u, 8u, 64u}) {
                o.require(sup_norm_2pi(fejer_mean(f, k) - fejer_mean(f, k, FejerMethod::Kernel)) <= 1e-8,
                          std::string("methods disagree on ") + name);
            }
        }
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> a(6);
            for (double& v : a) v = coef(rng);
            const GridFunction f = sample_function(
                [&](double x) {
                    double v = 0.0;
                    for (std::size_t h = 0; h < a.size(); ++h) v += a[h] * std::sin(static_cast<double>(h + 1) * x + a[h]);
                    return std::abs(v);
                },
                m);
            const GridFunction g = fejer_mean(f, 1 + static_cast<std::size_t>(t) % 64);
            o.require(*std::min_element(g.samples.begin(), g.samples.end()) >= -1e-12, "positivity trial " + std::to_string(t));
        }
    });

    criterion(7, "second moment and theta", [](Outcome& o) {
        const SeqPrefix theta = theta_sequence(fejer_family(), 64, 1024);
        for (std::size_t k = 1; k <= 64; ++k) {
            const GridFunction mom = second_moment(fejer_family(), k, 1024);
            const double sup = *std::max_element(mom.samples.begin(), mom.samples.end());
            o.require(std::abs(sup - oracle::fejer_moment(k)) <= 1e-8, "moment k=" + std::to_string(k));
            o.require(std::abs(theta.at(k) - std::sqrt(sup)) <= 1e-12, "theta k=" + std::to_string(k));
        }
    });

    criterion(8, "korovkin positive case", [](Outcome& o) {
        const FibCache cache = build_fib_cache(300);
        const KorovkinReport r = korovkin_audit(
            fejer_family(),
            {{"sin2", target_function("sin2", 1024)}, {"abs-sin-smoothed", target_function("abs-sin-smoothed", 1024)}},
            256, cache);
        for (const char* fn : {"sin2", "abs-sin-smoothed"}) {
            const ErrorRecord& rec = r.record(fn);
            for (const char* mode : {"classical", "statistical", "fib-statistical"}) {
                o.require(rec.verdict(mode) == Convergence::Convergent, std::string(fn) + " " + mode);
            }
        }
        const double e256 = r.record("sin2").errors.values.at(256);
        o.require(e256 <= 0.02, "e_256(sin2) = " + std::to_string(e256));
    });

    cli::RunOutput audit_a;
    criterion(9, "scaled-fejer example audit", [&audit_a](Outcome& o) {
        const std::size_t k_max = 256;
        const FibCache cache = build_fib_cache(k_max + 1);
        const KorovkinReport r = korovkin_audit(paper_example_operator(k_max), {}, k_max, cache);
        const ErrorRecord& one = r.record("1");
        const ExactSeqPrefix y = exact_witness(Witness::FibSquares, k_max);
        o.require(one.errors.exact.has_value(), "exact errors");
        for (std::size_t k = 1; k <= k_max && one.errors.exact; ++k) {
            o.require(one.errors.exact->at(k) == y.at(k), "e_k(1) = y_k at " + std::to_string(k));
        }
        o.require(one.transformed.size() == k_max && one.transformed.at(1) == 1.0, "F(e(1)) first term");
        for (std::size_t k = 2; k <= one.transformed.size(); ++k) {
            o.require(std::abs(one.transformed.at(k)) <= 1e-9, "F(e(1)) at " + std::to_string(k));
        }
        o.require(r.record("sin").transformed.size() > 0 && r.record("cos").transformed.size() > 0,
                  "sin/cos sequences measured");

        audit_a = cli::execute(cli::resolve_config("full-paper-audit", {}));
        const auto& disc = audit_a.artifacts.discrepancies;
        o.require(disc.has_value(), "discrepancy report");
        if (disc) {
            auto has = [&](const std::string& id) {
                for (const auto& d : (*disc)["discrepancies"]) {
                    if (d["id"] == id) return true;
                }
                return false;
            };
            for (const char* id : {"u-linear-in-S(F)", "example-condition-k2", "example-condition-k3"}) {
                o.require(has(id), std::string("discrepancy entry ") + id);
            }
        }
    });

    criterion(10, "rates", [](Outcome& o) {
        const std::size_t n = 100000;
        const SeqPrefix sq = exceedance_sequence("squares", [](std::size_t k) { return is_square(k); }, n);
        const RateReport pass = rate_verdict(sq, 0.0, weights::by_name("n^-1/4"), 0.5, n);
        const RateReport fail = rate_verdict(sq, 0.0, weights::by_name("n^-1"), 0.5, n);
        o.require(pass.counts.back() == oracle::isqrt(n), "counting oracle");
        o.require(pass.verdict == RateClass::RateO, "n^-1/4 verdict " + std::string(to_string(pass.verdict)));
        o.require(fail.verdict == RateClass::NotAtThisRate, "n^-1 verdict " + std::string(to_string(fail.verdict)));
        for (const char* fn : {"sin", "sin2"}) {
            const GridFunction f = target_function(fn, 1024);
            const RateBoundReport b = theorem_3_8_audit(fejer_family(), f, 128);
            o.require(b.kmax == std::max(2.0, sup_norm_2pi(f)), "Kmax");
            o.require(b.holds() && b.min_margin > 0.0, std::string("bound for ") + fn);
        }
    });

    criterion(11, "determinism", [&audit_a](Outcome& o) {
        const cli::RunOutput b = cli::execute(cli::resolve_config("full-paper-audit", {}));
        o.require(!audit_a.report.empty(), "first run available");
        o.require(audit_a.report == b.report, "reports differ");
        o.require(audit_a.artifacts.discrepancies == b.artifacts.discrepancies, "discrepancies differ");
    });

    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
