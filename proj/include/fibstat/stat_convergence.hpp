#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fibstat/density.hpp"
#include "fibstat/error.hpp"
#include "fibstat/fib_core.hpp"
#include "fibstat/sequence.hpp"

namespace fibstat {

struct StatConfig {
    DensityConfig density;
    /// Fraction of |values| dropped at each end before the histogram.
    double trim_fraction = 0.01;
    /// Minimum share of the trimmed mass a histogram bin needs to propose a limit.
    double mode_mass = 0.5;
    std::size_t cauchy_pivots = 32;
    /// Absolute tolerance for the c / c0 tail tests.
    double convergence_tolerance = 1e-6;
    /// l_inf fails when the last dyadic window max exceeds this multiple of the previous one.
    double growth_ratio = 1.5;
    std::size_t min_horizon = 1000;
};

enum class StatClass { StatConvergent, StatCauchyOnly, StatBoundedOnly, Divergent, Inconclusive };

inline std::string_view to_string(StatClass c) {
    switch (c) {
        case StatClass::StatConvergent: return "stat-convergent";
        case StatClass::StatCauchyOnly: return "stat-cauchy-only";
        case StatClass::StatBoundedOnly: return "stat-bounded-only";
        case StatClass::Divergent: return "divergent";
        case StatClass::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

enum class Tri { Yes, No, Inconclusive };

inline std::string_view to_string(Tri t) {
    switch (t) {
        case Tri::Yes: return "yes";
        case Tri::No: return "no";
        case Tri::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct EpsilonDeviation {
    double epsilon = 0.0;
    /// Density of K_eps = {k <= N : |x_k - L| >= eps}.
    DensityReport density;
};

struct StatVerdict {
    std::string label;
    std::size_t horizon = 0;
    std::optional<double> limit;
    std::vector<double> epsilon_grid;
    std::vector<EpsilonDeviation> deviations;
    std::vector<double> candidates;
    StatClass classification = StatClass::Inconclusive;
    std::string reason;

    bool convergent() const noexcept { return classification == StatClass::StatConvergent; }
};

struct CauchyVerdict {
    std::string label;
    std::size_t horizon = 0;
    Tri answer = Tri::Inconclusive;
    std::vector<double> epsilon_grid;
    /// Pivot N(eps) that worked, per epsilon.
    std::vector<std::optional<std::size_t>> pivots;
    std::string reason;
};

struct BoundedVerdict {
    std::string label;
    std::size_t horizon = 0;
    Tri answer = Tri::Inconclusive;
    std::optional<double> bound;
    std::vector<double> candidates;
    std::string reason;
};

namespace detail {

inline void check_grid(std::span<const double> grid) {
    if (grid.empty()) {
        throw DomainError("epsilon grid is empty");
    }
    for (double e : grid) {
        if (!(e > 0.0) || !std::isfinite(e)) {
            throw DomainError("epsilon grid entries must be positive and finite");
        }
    }
}

/// True when the prefix overflows at or before index n.
inline bool overflows_within(const SeqPrefix& x, std::size_t n) { return x.overflow_at && *x.overflow_at <= n; }

inline void check_prefix(const SeqPrefix& x, std::size_t horizon) {
    if (x.terms.empty() && !x.overflow_at) {
        throw DomainError("sequence '" + x.label + "' is empty");
    }
    if (horizon > x.horizon) {
        throw DomainError("horizon " + std::to_string(horizon) + " exceeds the prefix length " +
                          std::to_string(x.horizon) + " of '" + x.label + "'");
    }
    if (!overflows_within(x, horizon) && x.size() < horizon) {
        throw DomainError("sequence '" + x.label + "' holds fewer than N terms");
    }
}

inline void check_min_horizon(std::size_t horizon, const StatConfig& config, std::string_view op) {
    if (horizon < config.min_horizon) {
        throw InvalidHorizon(std::string(op) + " needs N >= " + std::to_string(config.min_horizon) + ", got " +
                             std::to_string(horizon));
    }
}

inline double median_of(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

inline double quantile_of(std::vector<double>& values, double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    const auto it = values.begin() + static_cast<std::ptrdiff_t>(idx);
    std::nth_element(values.begin(), it, values.end());
    return *it;
}

/// Limit candidates: tail median, then medians of histogram bins of width
/// eps_min/2 holding at least `mode_mass` of the trimmed values.
inline std::vector<double> limit_candidates(std::span<const double> values, double eps_min, const StatConfig& config) {
    const std::size_t n = values.size();
    std::vector<double> candidates;
    candidates.push_back(median_of({values.begin() + static_cast<std::ptrdiff_t>(n / 2), values.end()}));

    std::vector<double> magnitudes(values.size());
    std::transform(values.begin(), values.end(), magnitudes.begin(), [](double v) { return std::abs(v); });
    const double lo_mag = quantile_of(magnitudes, config.trim_fraction);
    const double hi_mag = quantile_of(magnitudes, 1.0 - config.trim_fraction);
    std::vector<double> kept;
    kept.reserve(n);
    for (double v : values) {
        const double m = std::abs(v);
        if (m >= lo_mag && m <= hi_mag) {
            kept.push_back(v);
        }
    }
    if (!kept.empty()) {
        const auto [min_it, max_it] = std::minmax_element(kept.begin(), kept.end());
        const double lo = *min_it;
        const double span_width = *max_it - lo;
        constexpr double kMaxBins = 1 << 22;
        const double width = std::max(eps_min / 2.0, span_width / kMaxBins);
        const auto bins = static_cast<std::size_t>(std::floor(span_width / width)) + 1;
        std::vector<std::uint32_t> counts(bins, 0);
        auto bin_of = [&](double v) {
            return std::min(bins - 1, static_cast<std::size_t>(std::floor((v - lo) / width)));
        };
        for (double v : kept) {
            ++counts[bin_of(v)];
        }
        const double needed = config.mode_mass * static_cast<double>(kept.size());
        for (std::size_t b = 0; b < bins; ++b) {
            if (static_cast<double>(counts[b]) >= needed) {
                std::vector<double> in_bin;
                in_bin.reserve(counts[b]);
                for (double v : kept) {
                    if (bin_of(v) == b) {
                        in_bin.push_back(v);
                    }
                }
                candidates.push_back(median_of(std::move(in_bin)));
            }
        }
    }
    std::vector<double> unique;
    for (double c : candidates) {
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) {
            unique.push_back(c);
        }
    }
    return unique;
}

}  // namespace detail

/// Deviation densities of x around a fixed L for each epsilon. Classified
/// stat-convergent(L) when every deviation set has density verdict zero and
/// divergent when any is positive. Accepts short horizons (N >= 1).
inline StatVerdict deviation_verdict(const SeqPrefix& x, double limit, std::span<const double> epsilon_grid,
                                     std::size_t horizon, const StatConfig& config = {}) {
    detail::check_grid(epsilon_grid);
    detail::check_prefix(x, horizon);
    StatVerdict verdict;
    verdict.label = x.label;
    verdict.horizon = horizon;
    verdict.limit = limit;
    verdict.epsilon_grid.assign(epsilon_grid.begin(), epsilon_grid.end());
    verdict.candidates = {limit};
    if (detail::overflows_within(x, horizon)) {
        verdict.classification = StatClass::Divergent;
        verdict.reason = "binary64 overflow at n = " + std::to_string(*x.overflow_at) + "; tail diverges";
        return verdict;
    }
    bool all_zero = true;
    bool any_positive = false;
    for (double eps : epsilon_grid) {
        EpsilonDeviation dev;
        dev.epsilon = eps;
        dev.density = density_of([&](std::uint64_t k) { return std::abs(x.terms[k - 1] - limit) >= eps; }, horizon,
                                 config.density);
        all_zero = all_zero && dev.density.verdict == DensityVerdict::Zero;
        any_positive = any_positive || dev.density.verdict == DensityVerdict::Positive;
        verdict.deviations.push_back(std::move(dev));
    }
    if (all_zero) {
        verdict.classification = StatClass::StatConvergent;
        verdict.reason = "every deviation set has density zero";
    } else if (any_positive) {
        verdict.classification = StatClass::Divergent;
        verdict.reason = "a deviation set has positive density";
    } else {
        verdict.classification = StatClass::Inconclusive;
        verdict.reason = "a deviation density straddles the zero threshold";
    }
    return verdict;
}

/// Statistical limit search over histogram-mode and tail-median candidates.
inline StatVerdict stat_limit(const SeqPrefix& x, std::span<const double> epsilon_grid, std::size_t horizon,
                              const StatConfig& config = {}) {
    detail::check_grid(epsilon_grid);
    detail::check_min_horizon(horizon, config, "stat_limit");
    detail::check_prefix(x, horizon);
    if (detail::overflows_within(x, horizon)) {
        return deviation_verdict(x, 0.0, epsilon_grid, horizon, config);
    }
    const double eps_min = *std::min_element(epsilon_grid.begin(), epsilon_grid.end());
    const std::span<const double> values(x.terms.data(), horizon);
    const std::vector<double> candidates = detail::limit_candidates(values, eps_min, config);

    std::optional<StatVerdict> best;
    bool any_inconclusive = false;
    auto deviations_at_min = [&](const StatVerdict& v) {
        std::uint64_t worst = 0;
        for (const auto& d : v.deviations) {
            worst = std::max(worst, d.density.count);
        }
        return worst;
    };
    for (double c : candidates) {
        StatVerdict v = deviation_verdict(x, c, epsilon_grid, horizon, config);
        if (v.convergent()) {
            v.candidates = candidates;
            return v;
        }
        any_inconclusive = any_inconclusive || v.classification == StatClass::Inconclusive;
        if (!best || deviations_at_min(v) < deviations_at_min(*best)) {
            best = std::move(v);
        }
    }
    best->candidates = candidates;
    if (any_inconclusive) {
        best->classification = StatClass::Inconclusive;
        best->reason = "no candidate limit is decisive at this horizon";
    } else {
        best->classification = StatClass::Divergent;
        best->reason = "every candidate limit leaves a deviation set of positive density";
    }
    return *best;
}

/// Statistical Cauchy test: for each epsilon, some pivot p in the last decile
/// must give {k <= N : |x_k - x_p| >= eps} density zero.
inline CauchyVerdict stat_cauchy(const SeqPrefix& x, std::span<const double> epsilon_grid, std::size_t horizon,
                                 const StatConfig& config = {}) {
    detail::check_grid(epsilon_grid);
    detail::check_min_horizon(horizon, config, "stat_cauchy");
    detail::check_prefix(x, horizon);
    CauchyVerdict verdict;
    verdict.label = x.label;
    verdict.horizon = horizon;
    verdict.epsilon_grid.assign(epsilon_grid.begin(), epsilon_grid.end());
    if (detail::overflows_within(x, horizon)) {
        verdict.answer = Tri::No;
        verdict.pivots.assign(epsilon_grid.size(), std::nullopt);
        verdict.reason = "binary64 overflow; tail diverges";
        return verdict;
    }
    const std::size_t first = std::max<std::size_t>(1, (horizon * 9 + 9) / 10);
    const std::size_t span_len = horizon - first;
    const std::size_t count = std::max<std::size_t>(1, config.cauchy_pivots);
    std::vector<std::size_t> pivots;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t p = first + (count == 1 ? 0 : span_len * i / (count - 1));
        if (pivots.empty() || pivots.back() != p) {
            pivots.push_back(p);
        }
    }
    bool all_found = true;
    bool any_refuted = false;
    for (double eps : epsilon_grid) {
        std::optional<std::size_t> found;
        bool all_positive = true;
        for (std::size_t p : pivots) {
            const double anchor = x.terms[p - 1];
            const DensityReport d = density_of(
                [&](std::uint64_t k) { return std::abs(x.terms[k - 1] - anchor) >= eps; }, horizon, config.density);
            if (d.verdict == DensityVerdict::Zero) {
                found = p;
                break;
            }
            all_positive = all_positive && d.verdict == DensityVerdict::Positive;
        }
        verdict.pivots.push_back(found);
        all_found = all_found && found.has_value();
        any_refuted = any_refuted || (!found && all_positive);
    }
    if (all_found) {
        verdict.answer = Tri::Yes;
        verdict.reason = "a late pivot works for every epsilon";
    } else if (any_refuted) {
        verdict.answer = Tri::No;
        verdict.reason = "every pivot leaves a deviation set of positive density";
    } else {
        verdict.answer = Tri::Inconclusive;
        verdict.reason = "no pivot is decisive at this horizon";
    }
    return verdict;
}

/// d({k <= N : |x_k| > L}) has verdict zero.
inline bool admissible_bound(const SeqPrefix& x, double bound, std::size_t horizon, const StatConfig& config = {}) {
    detail::check_prefix(x, horizon);
    if (detail::overflows_within(x, horizon)) {
        return false;
    }
    return density_of([&](std::uint64_t k) { return std::abs(x.terms[k - 1]) > bound; }, horizon, config.density)
               .verdict == DensityVerdict::Zero;
}

/// Smallest admissible L among 0 and quantiles of |x_k| over the first
/// quarter of the prefix. Bounds drawn from early terms cannot absorb growth
/// that only shows later.
inline BoundedVerdict stat_bounded(const SeqPrefix& x, std::size_t horizon, const StatConfig& config = {}) {
    detail::check_min_horizon(horizon, config, "stat_bounded");
    detail::check_prefix(x, horizon);
    BoundedVerdict verdict;
    verdict.label = x.label;
    verdict.horizon = horizon;
    if (detail::overflows_within(x, horizon)) {
        verdict.answer = Tri::No;
        verdict.reason = "binary64 overflow; no finite bound";
        return verdict;
    }
    std::vector<double> early;
    early.reserve(horizon / 4);
    for (std::size_t k = 1; k <= std::max<std::size_t>(1, horizon / 4); ++k) {
        early.push_back(std::abs(x.terms[k - 1]));
    }
    std::vector<double> candidates{0.0};
    for (double q : {0.5, 0.75, 0.9, 0.99, 1.0}) {
        candidates.push_back(detail::quantile_of(early, q));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    verdict.candidates = candidates;

    DensityVerdict last = DensityVerdict::Inconclusive;
    for (double bound : candidates) {
        const DensityReport d =
            density_of([&](std::uint64_t k) { return std::abs(x.terms[k - 1]) > bound; }, horizon, config.density);
        if (d.verdict == DensityVerdict::Zero) {
            verdict.answer = Tri::Yes;
            verdict.bound = bound;
            verdict.reason = "exceedance set of the bound has density zero";
            return verdict;
        }
        last = d.verdict;
    }
    if (last == DensityVerdict::Positive) {
        verdict.answer = Tri::No;
        verdict.reason = "even the largest early magnitude is exceeded on a set of positive density";
    } else {
        verdict.answer = Tri::Inconclusive;
        verdict.reason = "exceedance density of the largest candidate is not decisive";
    }
    return verdict;
}

/// F x as a prefix, with the horizon of the input.
inline SeqPrefix transformed_prefix(const SeqSample& x, const FibCache& cache) {
    return fib_difference_transform(x, cache).as_prefix("F(" + x.label() + ")", x.horizon());
}

inline StatVerdict fib_stat_limit(const SeqSample& x, std::span<const double> epsilon_grid, std::size_t horizon,
                                  const FibCache& cache, const StatConfig& config = {}) {
    detail::check_min_horizon(horizon, config, "fib_stat_limit");
    return stat_limit(transformed_prefix(x, cache), epsilon_grid, horizon, config);
}

inline CauchyVerdict fib_stat_cauchy(const SeqSample& x, std::span<const double> epsilon_grid, std::size_t horizon,
                                     const FibCache& cache, const StatConfig& config = {}) {
    return stat_cauchy(transformed_prefix(x, cache), epsilon_grid, horizon, config);
}

inline BoundedVerdict fib_stat_bounded(const SeqSample& x, std::size_t horizon, const FibCache& cache,
                                       const StatConfig& config = {}) {
    return stat_bounded(transformed_prefix(x, cache), horizon, config);
}

struct MembershipFlag {
    Tri value = Tri::Inconclusive;
    std::string evidence;
};

/// Flags for one side (x itself, or F x). For F x the bounded-sequence space
/// m(F) coincides with l_inf(F).
struct SpaceFlags {
    MembershipFlag c;
    MembershipFlag c0;
    MembershipFlag l_inf;
    MembershipFlag s;
    MembershipFlag stat_bounded;
    MembershipFlag m0;
};

struct MembershipRecord {
    std::string label;
    std::size_t horizon = 0;
    SpaceFlags raw;
    SpaceFlags transformed;
    StatVerdict raw_limit;
    StatVerdict transformed_limit;
    std::vector<std::string> violations;
};

namespace detail {

inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline Tri from_stat(const StatVerdict& v) {
    switch (v.classification) {
        case StatClass::StatConvergent: return Tri::Yes;
        case StatClass::Inconclusive: return Tri::Inconclusive;
        default: return Tri::No;
    }
}

inline Tri both(Tri a, Tri b) {
    if (a == Tri::No || b == Tri::No) return Tri::No;
    if (a == Tri::Yes && b == Tri::Yes) return Tri::Yes;
    return Tri::Inconclusive;
}

inline SpaceFlags space_flags(const SeqPrefix& x, std::size_t horizon, std::span<const double> epsilon_grid,
                              const StatConfig& config, StatVerdict& limit_out) {
    SpaceFlags flags;
    const double tol = config.convergence_tolerance;
    if (overflows_within(x, horizon)) {
        const std::string why = "binary64 overflow at n = " + std::to_string(*x.overflow_at);
        flags.c = {Tri::No, why};
        flags.c0 = {Tri::No, why};
        flags.l_inf = {Tri::No, why};
    } else {
        const double last = x.terms[horizon - 1];
        double oscillation = 0.0;
        for (std::size_t k = (horizon + 1) / 2; k <= horizon; ++k) {
            oscillation = std::max(oscillation, std::abs(x.terms[k - 1] - last));
        }
        const bool converges = oscillation <= tol;
        flags.c = {converges ? Tri::Yes : Tri::No, "tail oscillation " + fmt_num(oscillation)};
        flags.c0 = {converges && std::abs(last) <= tol ? Tri::Yes : Tri::No,
                    "tail oscillation " + fmt_num(oscillation) + ", |x_N| " + fmt_num(std::abs(last))};
        double prev_max = 0.0;
        double last_max = 0.0;
        for (std::size_t k = std::max<std::size_t>(1, (horizon + 3) / 4); k <= horizon / 2; ++k) {
            prev_max = std::max(prev_max, std::abs(x.terms[k - 1]));
        }
        for (std::size_t k = (horizon + 1) / 2; k <= horizon; ++k) {
            last_max = std::max(last_max, std::abs(x.terms[k - 1]));
        }
        const bool grows = last_max > tol && last_max > config.growth_ratio * prev_max;
        flags.l_inf = {grows ? Tri::No : Tri::Yes,
                       "window max " + fmt_num(prev_max) + " -> " + fmt_num(last_max)};
    }
    limit_out = stat_limit(x, epsilon_grid, horizon, config);
    flags.s = {from_stat(limit_out), std::string(to_string(limit_out.classification)) +
                                         (limit_out.limit ? " L=" + fmt_num(*limit_out.limit) : std::string())};
    const BoundedVerdict bounded = stat_bounded(x, horizon, config);
    flags.stat_bounded = {bounded.answer,
                          bounded.bound ? "bound " + fmt_num(*bounded.bound) : bounded.reason};
    flags.m0 = {both(flags.stat_bounded.value, flags.s.value), "statistically bounded and statistically convergent"};
    return flags;
}

inline void check_implications(const SpaceFlags& f, std::string_view side, std::vector<std::string>& out) {
    auto implies = [&](const MembershipFlag& a, const MembershipFlag& b, std::string_view what) {
        if (a.value == Tri::Yes && b.value == Tri::No) {
            out.push_back(std::string(side) + ": " + std::string(what));
        }
    };
    implies(f.c, f.s, "c but not S");
    implies(f.c, f.l_inf, "c but not l_inf");
    implies(f.c0, f.c, "c0 but not c");
    implies(f.s, f.stat_bounded, "S but not statistically bounded");
    implies(f.m0, f.s, "m0 but not S");
}

}  // namespace detail

/// Finite-horizon membership of x and F x in the classical and statistical
/// sequence spaces, with implication checks among the flags.
inline MembershipRecord space_membership(const SeqSample& x, std::span<const double> epsilon_grid,
                                         std::size_t horizon, const FibCache& cache, const StatConfig& config = {}) {
    detail::check_grid(epsilon_grid);
    detail::check_min_horizon(horizon, config, "space_membership");
    MembershipRecord record;
    record.label = x.label();
    record.horizon = horizon;
    record.raw = detail::space_flags(x.values, horizon, epsilon_grid, config, record.raw_limit);
    const SeqPrefix fx = transformed_prefix(x, cache);
    record.transformed = detail::space_flags(fx, horizon, epsilon_grid, config, record.transformed_limit);
    detail::check_implications(record.raw, "x", record.violations);
    detail::check_implications(record.transformed, "F x", record.violations);
    return record;
}

struct MemberAudit {
    std::string label;
    std::size_t horizon = 0;
    StatVerdict stat;
    CauchyVerdict cauchy;
    BoundedVerdict bounded;
    StatVerdict fib_stat;
    CauchyVerdict fib_cauchy;
    BoundedVerdict fib_bounded;
    /// The squares get density verdict zero at this horizon.
    bool mutation_applicable = false;
    /// Verdict on F x after adding 5 at square indices of F x.
    StatVerdict mutated_transform_stat;
    bool mutated_transform_unchanged = false;
    /// Verdict on F(x') where x' adds 5 at square indices of x.
    StatVerdict mutated_input_stat;
    bool mutated_input_changed = false;
    std::vector<std::string> violations;
    std::vector<std::string> unconfirmed;
};

struct TheoremAuditReport {
    std::vector<MemberAudit> members;

    std::size_t violation_count() const {
        std::size_t n = 0;
        for (const auto& m : members) {
            n += m.violations.size();
        }
        return n;
    }
};

namespace detail {

inline bool same_verdict(const StatVerdict& a, const StatVerdict& b, double tol) {
    if (a.classification != b.classification) {
        return false;
    }
    if (a.classification != StatClass::StatConvergent) {
        return true;
    }
    return a.limit && b.limit && std::abs(*a.limit - *b.limit) <= tol;
}

inline void implication(bool premise, Tri conclusion, const std::string& what, MemberAudit& out) {
    if (!premise) {
        return;
    }
    if (conclusion == Tri::No) {
        out.violations.push_back(what);
    } else if (conclusion == Tri::Inconclusive) {
        out.unconfirmed.push_back(what);
    }
}

}  // namespace detail

/// Checks on every corpus member: statistically convergent implies
/// statistically Cauchy and statistically bounded, both for x and for F x;
/// and an F-statistical verdict survives changing F x on a density-zero set.
inline TheoremAuditReport theorem_audit(const std::vector<SeqSample>& corpus, std::span<const double> epsilon_grid,
                                        std::size_t horizon, const FibCache& cache, const StatConfig& config = {}) {
    if (corpus.empty()) {
        throw DomainError("theorem_audit needs a nonempty corpus");
    }
    detail::check_grid(epsilon_grid);
    const double eps_min = *std::min_element(epsilon_grid.begin(), epsilon_grid.end());
    TheoremAuditReport report;
    for (const SeqSample& member : corpus) {
        const std::size_t n = std::min(horizon, member.horizon());
        detail::check_min_horizon(n, config, "theorem_audit");
        MemberAudit audit;
        audit.label = member.label();
        audit.horizon = n;
        audit.stat = stat_limit(member.values, epsilon_grid, n, config);
        audit.cauchy = stat_cauchy(member.values, epsilon_grid, n, config);
        audit.bounded = stat_bounded(member.values, n, config);

        SeqPrefix fx = transformed_prefix(member, cache);
        audit.fib_stat = stat_limit(fx, epsilon_grid, n, config);
        audit.fib_cauchy = stat_cauchy(fx, epsilon_grid, n, config);
        audit.fib_bounded = stat_bounded(fx, n, config);

        detail::implication(audit.stat.convergent(), audit.cauchy.answer, "S-convergent but not S-Cauchy", audit);
        detail::implication(audit.stat.convergent(), audit.bounded.answer,
                            "S-convergent but not statistically bounded", audit);
        detail::implication(audit.fib_stat.convergent(), audit.fib_cauchy.answer,
                            "F-statistically convergent but not F-statistically Cauchy", audit);
        detail::implication(audit.fib_stat.convergent(), audit.fib_bounded.answer,
                            "F-statistically convergent but not F-statistically bounded", audit);

        // The mutation set must itself read as density zero at this horizon.
        audit.mutation_applicable =
            density_of([](std::uint64_t k) { return is_square(k); }, n, config.density).verdict ==
            DensityVerdict::Zero;
        SeqPrefix mutated_fx = fx;
        for (std::size_t k = 1; k <= mutated_fx.size(); ++k) {
            if (is_square(k)) {
                mutated_fx.terms[k - 1] += 5.0;
            }
        }
        audit.mutated_transform_stat = stat_limit(mutated_fx, epsilon_grid, n, config);
        audit.mutated_transform_unchanged = detail::same_verdict(audit.fib_stat, audit.mutated_transform_stat, eps_min);
        if (audit.fib_stat.convergent() && !audit.mutated_transform_unchanged) {
            const std::string what = "F-statistical verdict changed by a modification of F x on the squares";
            if (audit.mutation_applicable) {
                audit.violations.push_back(what);
            } else {
                audit.unconfirmed.push_back(what + " (squares not resolvable as density zero at this N)");
            }
        }

        SeqSample mutated = member;
        for (std::size_t k = 1; k <= mutated.values.size(); ++k) {
            if (is_square(k)) {
                mutated.values.terms[k - 1] += 5.0;
            }
        }
        if (mutated.exact) {
            for (std::size_t k = 1; k <= mutated.exact->size(); ++k) {
                if (is_square(k)) {
                    mutated.exact->terms[k - 1] += 5;
                }
            }
            mutated.values = approximate(*mutated.exact);
        }
        audit.mutated_input_stat = stat_limit(transformed_prefix(mutated, cache), epsilon_grid, n, config);
        audit.mutated_input_changed = !detail::same_verdict(audit.fib_stat, audit.mutated_input_stat, eps_min);
        report.members.push_back(std::move(audit));
    }
    return report;
}

}  // namespace fibstat
