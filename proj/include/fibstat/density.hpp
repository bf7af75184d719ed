#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fibstat/error.hpp"
#include "fibstat/sequence.hpp"

namespace fibstat {

/// Subset of the positive integers given by a membership predicate.
struct IndexSet {
    std::string name;
    std::function<bool(std::uint64_t)> contains;
    /// Known natural density, for oracle sets.
    std::optional<double> exact_density;
};

namespace sets {

inline IndexSet all_integers() { return {"all", [](std::uint64_t) { return true; }, 1.0}; }
inline IndexSet evens() { return {"evens", [](std::uint64_t n) { return n % 2 == 0; }, 0.5}; }
inline IndexSet odds() { return {"odds", [](std::uint64_t n) { return n % 2 == 1; }, 0.5}; }
inline IndexSet squares() { return {"squares", [](std::uint64_t n) { return is_square(n); }, 0.0}; }

inline IndexSet cubes() {
    return {"cubes",
            [](std::uint64_t n) {
                auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
                while (r * r * r > n) {
                    --r;
                }
                while ((r + 1) * (r + 1) * (r + 1) <= n) {
                    ++r;
                }
                return r * r * r == n;
            },
            0.0};
}

inline IndexSet powers_of_two() {
    return {"powers-of-2", [](std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }, 0.0};
}

inline IndexSet multiples_of(std::uint64_t q) {
    if (q == 0) {
        throw DomainError("multiples_of needs q >= 1");
    }
    return {"multiples-of-" + std::to_string(q), [q](std::uint64_t n) { return n % q == 0; },
            1.0 / static_cast<double>(q)};
}

inline IndexSet complement(const IndexSet& a) {
    std::optional<double> d;
    if (a.exact_density) {
        d = 1.0 - *a.exact_density;
    }
    return {"not(" + a.name + ")", [f = a.contains](std::uint64_t n) { return !f(n); }, d};
}

/// Densities of unions and intersections are not determined by the parts,
/// so the result carries none unless supplied.
inline IndexSet union_of(const IndexSet& a, const IndexSet& b, std::optional<double> density = {}) {
    return {a.name + "|" + b.name, [f = a.contains, g = b.contains](std::uint64_t n) { return f(n) || g(n); },
            density};
}

inline IndexSet intersection_of(const IndexSet& a, const IndexSet& b, std::optional<double> density = {}) {
    return {a.name + "&" + b.name, [f = a.contains, g = b.contains](std::uint64_t n) { return f(n) && g(n); },
            density};
}

/// Named oracle sets: all, evens, odds, squares, non-squares, cubes,
/// powers-of-2, multiples-of-<q>.
inline IndexSet by_name(std::string_view name) {
    if (name == "all") return all_integers();
    if (name == "evens") return evens();
    if (name == "odds") return odds();
    if (name == "squares") return squares();
    if (name == "non-squares") {
        IndexSet s = complement(squares());
        s.name = "non-squares";
        return s;
    }
    if (name == "cubes") return cubes();
    if (name == "powers-of-2") return powers_of_two();
    constexpr std::string_view prefix = "multiples-of-";
    if (name.substr(0, prefix.size()) == prefix) {
        const std::string digits(name.substr(prefix.size()));
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            return multiples_of(std::stoull(digits));
        }
    }
    throw DomainError("unknown index set '" + std::string(name) + "'");
}

}  // namespace sets

/// A(n) = |{a <= n : a in A}|.
inline std::uint64_t counting_function(const IndexSet& set, std::uint64_t n) {
    if (n < 1) {
        throw DomainError("counting_function needs n >= 1");
    }
    std::uint64_t count = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        count += set.contains(k) ? 1 : 0;
    }
    return count;
}

struct DensityConfig {
    double zero_threshold = 0.005;
};

enum class DensityVerdict { Zero, Positive, Inconclusive };

inline std::string_view to_string(DensityVerdict v) {
    switch (v) {
        case DensityVerdict::Zero: return "zero";
        case DensityVerdict::Positive: return "positive";
        case DensityVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

/// Finite-horizon density estimate. The liminf and limsup are proxied by the
/// min and max of A(n)/n over the tail window ceil(N/2) <= n <= N.
struct DensityReport {
    std::uint64_t horizon = 0;
    std::uint64_t count = 0;
    double point_estimate = 0.0;
    double tail_min = 0.0;
    double tail_max = 0.0;
    /// No member falls inside the tail window.
    bool tail_empty = false;
    DensityVerdict verdict = DensityVerdict::Inconclusive;
    /// Which rule produced the verdict.
    std::string rule;
};

/// Density report for the indicator `member(k)`, k = 1..N.
///
/// zero:     tail_max <= threshold, or no member in the tail window (the set
///           looks finite at this horizon);
/// positive: tail_min > threshold;
/// otherwise inconclusive.
template <class Member>
DensityReport density_of(Member&& member, std::uint64_t horizon, const DensityConfig& config = {}) {
    if (horizon < 1) {
        throw InvalidHorizon("density needs N >= 1");
    }
    const std::uint64_t window_start = (horizon + 1) / 2;
    DensityReport report;
    report.horizon = horizon;
    std::uint64_t count = 0;
    std::uint64_t count_before_window = 0;
    double lo = 1.0;
    double hi = 0.0;
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        if (k == window_start) {
            count_before_window = count;
        }
        count += member(k) ? 1 : 0;
        if (k >= window_start) {
            const double ratio = static_cast<double>(count) / static_cast<double>(k);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    report.count = count;
    report.point_estimate = static_cast<double>(count) / static_cast<double>(horizon);
    report.tail_min = lo;
    report.tail_max = hi;
    report.tail_empty = count == count_before_window;
    if (report.tail_max <= config.zero_threshold) {
        report.verdict = DensityVerdict::Zero;
        report.rule = "tail_max <= zero_threshold";
    } else if (report.tail_empty) {
        report.verdict = DensityVerdict::Zero;
        report.rule = "no members in tail window";
    } else if (report.tail_min > config.zero_threshold) {
        report.verdict = DensityVerdict::Positive;
        report.rule = "tail_min > zero_threshold";
    } else {
        report.verdict = DensityVerdict::Inconclusive;
        report.rule = "tail window straddles zero_threshold";
    }
    return report;
}

inline DensityReport density_estimate(const IndexSet& set, std::uint64_t horizon, const DensityConfig& config = {}) {
    if (horizon < 100) {
        throw InvalidHorizon("density_estimate needs N >= 100, got " + std::to_string(horizon));
    }
    return density_of(set.contains, horizon, config);
}

struct AxiomCheck {
    std::string name;
    bool applicable = true;
    bool holds = true;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string detail;
};

struct AxiomReport {
    std::uint64_t horizon = 0;
    double tolerance = 0.0;
    std::vector<AxiomCheck> checks;

    bool all_hold() const {
        return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return !c.applicable || c.holds; });
    }
};

/// Lower-density proxy: the tail minimum.
inline double lower_density(const IndexSet& set, std::uint64_t horizon) {
    return density_of(set.contains, horizon).tail_min;
}

/// Upper density through the complement: 1 - lower(Z+ \ A).
inline double upper_density(const IndexSet& set, std::uint64_t horizon) {
    return 1.0 - lower_density(sets::complement(set), horizon);
}

inline bool overlaps(const IndexSet& a, const IndexSet& b, std::uint64_t horizon) {
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        if (a.contains(k) && b.contains(k)) {
            return true;
        }
    }
    return false;
}

/// Superadditivity on disjoint sets: f(A) + f(B) <= f(A u B) + tol.
inline AxiomCheck check_disjoint_superadditivity(const IndexSet& a, const IndexSet& b, std::uint64_t horizon) {
    if (overlaps(a, b, horizon)) {
        throw OverlapError("sets '" + a.name + "' and '" + b.name + "' overlap; disjoint check does not apply");
    }
    const double tol = 2.0 / std::sqrt(static_cast<double>(horizon));
    AxiomCheck c;
    c.name = "disjoint-superadditivity";
    c.lhs = lower_density(a, horizon) + lower_density(b, horizon);
    c.rhs = lower_density(sets::union_of(a, b), horizon);
    c.holds = c.lhs <= c.rhs + tol;
    return c;
}

/// Freedman-Sember style axiom checks on the lower-density proxy at horizon N,
/// for oracle sets whose exact densities are known. tol = 2/sqrt(N).
inline AxiomReport axiom_suite(const IndexSet& a, const IndexSet& b, std::uint64_t horizon) {
    if (!a.exact_density || !b.exact_density) {
        throw DomainError("axiom_suite needs oracle sets with known densities");
    }
    if (horizon < 100) {
        throw InvalidHorizon("axiom_suite needs N >= 100");
    }
    AxiomReport report;
    report.horizon = horizon;
    report.tolerance = 2.0 / std::sqrt(static_cast<double>(horizon));
    const double tol = report.tolerance;
    const double fa = lower_density(a, horizon);
    const double fb = lower_density(b, horizon);

    {
        // Asymptotic equality: flipping the first 16 indices leaves the density.
        IndexSet modified{a.name + "~", [f = a.contains](std::uint64_t n) { return n <= 16 ? !f(n) : f(n); },
                          a.exact_density};
        AxiomCheck c;
        c.name = "finite-modification";
        c.lhs = fa;
        c.rhs = lower_density(modified, horizon);
        c.holds = std::abs(c.lhs - c.rhs) <= tol;
        report.checks.push_back(c);
    }
    if (overlaps(a, b, horizon)) {
        AxiomCheck c;
        c.name = "disjoint-superadditivity";
        c.applicable = false;
        c.detail = "sets overlap";
        report.checks.push_back(c);
    } else {
        report.checks.push_back(check_disjoint_superadditivity(a, b, horizon));
    }
    {
        AxiomCheck c;
        c.name = "intersection-bound";
        c.lhs = fa + fb;
        c.rhs = 1.0 + lower_density(sets::intersection_of(a, b), horizon);
        c.holds = c.lhs <= c.rhs + tol;
        report.checks.push_back(c);
    }
    {
        AxiomCheck c;
        c.name = "whole-set";
        c.lhs = lower_density(sets::all_integers(), horizon);
        c.rhs = 1.0;
        c.holds = c.lhs == 1.0;
        report.checks.push_back(c);
    }
    for (const IndexSet* s : {&a, &b}) {
        AxiomCheck c;
        c.name = "upper-density-complement(" + s->name + ")";
        c.lhs = upper_density(*s, horizon);
        c.rhs = *s->exact_density;
        c.holds = std::abs(c.lhs - c.rhs) <= tol && c.lhs + tol >= lower_density(*s, horizon);
        report.checks.push_back(c);
    }
    return report;
}

}  // namespace fibstat
