#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fibstat/error.hpp"
#include "fibstat/fib_core.hpp"
#include "fibstat/korovkin.hpp"
#include "fibstat/sequence.hpp"
#include "fibstat/stat_convergence.hpp"

namespace fibstat {

/// Modulus of continuity of the piecewise-linear interpolant of the grid
/// samples: sup |g(x) - g(y)| over |x - y| <= delta. It agrees with the grid
/// samples at the nodes and, unlike the plain grid-pair maximum, is exactly
/// nondecreasing and subadditive in delta.
inline double modulus_of_continuity(const GridFunction& f, double delta) {
    if (!(delta > 0.0)) {
        throw DomainError("modulus of continuity needs delta > 0");
    }
    if (delta > 2.0 * std::numbers::pi) {
        throw DomainError("modulus of continuity needs delta <= 2 pi");
    }
    detail::check_grid_function(f);
    const std::size_t m = f.size();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
    const double ratio = delta / step;
    const auto whole = static_cast<std::size_t>(std::floor(ratio));
    const double t = ratio - static_cast<double>(whole);
    auto at = [&](std::size_t j) { return f.samples[j % m]; };

    if (whole >= m / 2) {
        const auto [lo, hi] = std::minmax_element(f.samples.begin(), f.samples.end());
        return *hi - *lo;
    }
    double omega = 0.0;
    for (std::size_t d = 1; d <= whole; ++d) {
        for (std::size_t j = 0; j < m; ++j) {
            omega = std::max(omega, std::abs(at(j + d) - at(j)));
        }
    }
    if (t > 0.0) {
        // Pairs at distance exactly delta with one end on a node.
        for (std::size_t j = 0; j < m; ++j) {
            const double fj = at(j);
            const double right = (1.0 - t) * at(j + whole) + t * at(j + whole + 1);
            const double left = t * fj + (1.0 - t) * at(j + 1);
            omega = std::max({omega, std::abs(right - fj), std::abs(at(j + whole + 1) - left)});
        }
    }
    return omega;
}

/// theta_k = sqrt(sup_x L_k(psi, x)), k = 1..K.
inline SeqPrefix theta_sequence(const OperatorFamily& family, std::size_t max_index, std::size_t grid_size = 1024) {
    if (max_index < 1) {
        throw InvalidHorizon("theta_sequence needs K >= 1");
    }
    SeqPrefix theta;
    theta.label = "theta(" + family.name + ")";
    theta.horizon = max_index;
    theta.terms.reserve(max_index);
    for (std::size_t k = 1; k <= max_index; ++k) {
        const GridFunction moment = second_moment(family, k, grid_size);
        const double sup = *std::max_element(moment.samples.begin(), moment.samples.end());
        if (!std::isfinite(sup)) {
            theta.overflow_at = k;
            break;
        }
        theta.terms.push_back(std::sqrt(std::max(0.0, sup)));
    }
    return theta;
}

/// Positive nonincreasing weights u_n.
struct RateWeights {
    std::string label;
    std::function<double(std::uint64_t)> u;
};

namespace weights {

inline RateWeights power(double exponent, std::string label) {
    return {std::move(label), [exponent](std::uint64_t n) { return std::pow(static_cast<double>(n), -exponent); }};
}

/// Presets: n^-1/4, n^-1/2, n^-1, inv-log (1/log(n+1)), const.
inline RateWeights by_name(std::string_view name) {
    if (name == "n^-1/4") return power(0.25, "n^-1/4");
    if (name == "n^-1/2") return power(0.5, "n^-1/2");
    if (name == "n^-1") return power(1.0, "n^-1");
    if (name == "inv-log") {
        return {"inv-log", [](std::uint64_t n) { return 1.0 / std::log(static_cast<double>(n) + 1.0); }};
    }
    if (name == "const") return {"const", [](std::uint64_t) { return 1.0; }};
    throw DomainError("unknown weights '" + std::string(name) + "'");
}

inline constexpr std::string_view kPresetNames[] = {"n^-1/4", "n^-1/2", "n^-1", "inv-log", "const"};

}  // namespace weights

inline void validate_weights(const RateWeights& w, std::size_t horizon) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const double v = w.u(n);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("weights '" + w.label + "' are not positive at n = " + std::to_string(n));
        }
        if (v > previous) {
            throw DomainError("weights '" + w.label + "' increase at n = " + std::to_string(n));
        }
        previous = v;
    }
}

enum class RateClass { RateO, NotAtThisRate, Inconclusive };

inline std::string_view to_string(RateClass c) {
    switch (c) {
        case RateClass::RateO: return "rate-o";
        case RateClass::NotAtThisRate: return "not-at-this-rate";
        case RateClass::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct RateConfig {
    /// W(N) must not exceed this for a rate-o verdict.
    double final_threshold = 0.25;
    std::size_t min_horizon = 10000;
    std::size_t min_dyadic = 64;
};

/// Weighted exceedance counts W(n) = |{k <= n : |Fx_k - L| >= eps}| / (n u_n)
/// at dyadic horizons n = N, N/2, N/4, ... (stored in increasing n).
struct RateReport {
    std::string weights;
    double epsilon = 0.0;
    double limit = 0.0;
    std::size_t horizon = 0;
    std::vector<std::size_t> dyadic_horizons;
    std::vector<std::uint64_t> counts;
    std::vector<double> weighted;
    RateClass verdict = RateClass::Inconclusive;
    std::string rule;
};

/// Rate verdict on transformed-domain data (the sequence F x itself).
///
/// rate-o: W nonincreasing over N/4, N/2, N and W(N) <= final_threshold.
/// not-at-this-rate: W(N) > final_threshold and W nondecreasing there.
inline RateReport rate_verdict(const SeqPrefix& transformed, double limit, const RateWeights& w, double epsilon,
                               std::size_t horizon, const RateConfig& config = {}) {
    if (horizon < config.min_horizon) {
        throw InvalidHorizon("rate_verdict needs N >= " + std::to_string(config.min_horizon) + ", got " +
                             std::to_string(horizon));
    }
    if (!(epsilon > 0.0)) {
        throw DomainError("rate_verdict needs eps > 0");
    }
    validate_weights(w, horizon);
    detail::check_prefix(transformed, horizon);
    RateReport report;
    report.weights = w.label;
    report.epsilon = epsilon;
    report.limit = limit;
    report.horizon = horizon;
    report.rule = "W(n) = count(n) / (n u_n); rate-o iff W(N/4) >= W(N/2) >= W(N) and W(N) <= " +
                  detail::fmt_num(config.final_threshold);
    if (detail::overflows_within(transformed, horizon)) {
        report.verdict = RateClass::NotAtThisRate;
        report.rule = "binary64 overflow at n = " + std::to_string(*transformed.overflow_at);
        return report;
    }
    for (std::size_t n = horizon; n >= config.min_dyadic; n /= 2) {
        report.dyadic_horizons.push_back(n);
    }
    std::reverse(report.dyadic_horizons.begin(), report.dyadic_horizons.end());
    std::uint64_t count = 0;
    std::size_t next = 0;
    for (std::size_t k = 1; k <= horizon && next < report.dyadic_horizons.size(); ++k) {
        count += std::abs(transformed.terms[k - 1] - limit) >= epsilon ? 1 : 0;
        if (k == report.dyadic_horizons[next]) {
            report.counts.push_back(count);
            report.weighted.push_back(static_cast<double>(count) / (static_cast<double>(k) * w.u(k)));
            ++next;
        }
    }
    const std::size_t s = report.weighted.size();
    const double w_last = report.weighted[s - 1];
    const double w_mid = s >= 2 ? report.weighted[s - 2] : w_last;
    const double w_first = s >= 3 ? report.weighted[s - 3] : w_mid;
    if (w_last <= config.final_threshold && w_first >= w_mid && w_mid >= w_last) {
        report.verdict = RateClass::RateO;
    } else if (w_last > config.final_threshold && w_first <= w_mid && w_mid <= w_last) {
        report.verdict = RateClass::NotAtThisRate;
    } else {
        report.verdict = RateClass::Inconclusive;
    }
    return report;
}

/// Rate verdict for x: the transform is applied first.
inline RateReport rate_verdict(const SeqSample& x, double limit, const RateWeights& w, double epsilon,
                               std::size_t horizon, const FibCache& cache, const RateConfig& config = {}) {
    return rate_verdict(transformed_prefix(x, cache), limit, w, epsilon, horizon, config);
}

/// Transformed-domain sequence equal to `value` on `member` indices and 0 elsewhere.
template <class Member>
SeqPrefix exceedance_sequence(std::string label, Member&& member, std::size_t horizon, double value = 1.0) {
    SeqPrefix seq;
    seq.label = std::move(label);
    seq.horizon = horizon;
    seq.terms.resize(horizon);
    for (std::size_t k = 1; k <= horizon; ++k) {
        seq.terms[k - 1] = member(k) ? value : 0.0;
    }
    return seq;
}

struct AlgebraCheck {
    std::string name;
    RateReport report;
    bool passed = false;
};

struct RateAlgebraReport {
    bool preconditions_hold = false;
    RateReport x_report;
    RateReport y_report;
    std::vector<AlgebraCheck> checks;

    bool all_pass() const {
        return preconditions_hold &&
               std::all_of(checks.begin(), checks.end(), [](const AlgebraCheck& c) { return c.passed; });
    }
};

/// Scalar multiple, sum, difference and product rules for rates, checked on
/// transformed-domain data through rate_verdict.
inline RateAlgebraReport rate_algebra_check(const SeqPrefix& x, const SeqPrefix& y, double limit_x, double limit_y,
                                            const RateWeights& a, const RateWeights& b, double epsilon,
                                            std::size_t horizon, double alpha = 7.0, const RateConfig& config = {}) {
    RateAlgebraReport report;
    report.x_report = rate_verdict(x, limit_x, a, epsilon, horizon, config);
    report.y_report = rate_verdict(y, limit_y, b, epsilon, horizon, config);
    report.preconditions_hold =
        report.x_report.verdict == RateClass::RateO && report.y_report.verdict == RateClass::RateO;
    if (!report.preconditions_hold) {
        return report;
    }
    auto combine = [&](std::string label, auto op) {
        SeqPrefix out;
        out.label = std::move(label);
        out.horizon = horizon;
        out.terms.resize(horizon);
        for (std::size_t k = 0; k < horizon; ++k) {
            out.terms[k] = op(x.terms[k] - limit_x, y.terms[k] - limit_y);
        }
        return out;
    };
    const RateWeights c{"max(" + a.label + "," + b.label + ")",
                        [ua = a.u, ub = b.u](std::uint64_t n) { return std::max(ua(n), ub(n)); }};
    const RateWeights ab{a.label + "*" + b.label, [ua = a.u, ub = b.u](std::uint64_t n) { return ua(n) * ub(n); }};
    auto add_check = [&](std::string name, const SeqPrefix& seq, const RateWeights& wts) {
        AlgebraCheck check;
        check.name = std::move(name);
        check.report = rate_verdict(seq, 0.0, wts, epsilon, horizon, config);
        check.passed = check.report.verdict == RateClass::RateO;
        report.checks.push_back(std::move(check));
    };
    add_check("scalar", combine("alpha(x-L1)", [&](double u, double) { return alpha * u; }), a);
    add_check("sum", combine("(x-L1)+(y-L2)", [](double u, double v) { return u + v; }), c);
    add_check("difference", combine("(x-L1)-(y-L2)", [](double u, double v) { return u - v; }), c);
    add_check("product", combine("(x-L1)(y-L2)", [](double u, double v) { return u * v; }), ab);
    return report;
}

struct RateBoundRow {
    std::size_t k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double theta = 0.0;
    double omega = 0.0;
    double error_one = 0.0;
};

struct RateBoundReport {
    std::string family;
    std::string note;
    double kmax = 0.0;
    std::vector<RateBoundRow> rows;
    std::size_t pairs_checked = 0;
    std::size_t pair_violations = 0;
    double min_margin = 0.0;

    bool holds() const {
        return pair_violations == 0 &&
               std::all_of(rows.begin(), rows.end(), [](const RateBoundRow& r) { return r.margin >= 0.0; });
    }
};

/// For k = 1..K checks ||L_k f - f|| <= Kmax (e1 + w + w e1) with
/// e1 = ||L_k 1 - 1||, w = omega(f, theta_k), Kmax = max(2, ||f||), and the
/// pointwise bound |f(x) - f(y)| <= omega(f, d)(|x - y|/d + 1) on sampled pairs.
inline RateBoundReport theorem_3_8_audit(const OperatorFamily& family, const GridFunction& f, std::size_t max_index,
                                         std::uint64_t seed = 7) {
    if (max_index < 1) {
        throw InvalidHorizon("rate-bound audit needs K >= 1");
    }
    detail::check_grid_function(f);
    const std::size_t m = f.size();
    RateBoundReport report;
    report.family = family.name;
    report.note = "hypothesis (i) read as ||L_k(1) - 1||";
    report.kmax = std::max(2.0, sup_norm_2pi(f));
    const GridFunction one = constant_function(1.0, m);
    report.min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> deltas;
    for (std::size_t k = 1; k <= max_index; ++k) {
        RateBoundRow row;
        row.k = k;
        row.lhs = sup_norm_2pi(family(k, f) - f);
        row.error_one = sup_norm_2pi(family(k, one) - one);
        const GridFunction moment = second_moment(family, k, m);
        row.theta = std::sqrt(std::max(0.0, *std::max_element(moment.samples.begin(), moment.samples.end())));
        row.omega = row.theta > 0.0 ? modulus_of_continuity(f, std::min(row.theta, 2.0 * std::numbers::pi)) : 0.0;
        row.rhs = report.kmax * (row.error_one + row.omega + row.omega * row.error_one);
        row.margin = row.rhs - row.lhs;
        report.min_margin = std::min(report.min_margin, row.margin);
        if (row.theta > 0.0 && (k == 1 || k == max_index || k % 16 == 0)) {
            deltas.push_back(std::min(row.theta, 2.0 * std::numbers::pi));
        }
        report.rows.push_back(row);
    }
    deltas.push_back(0.1);
    deltas.push_back(0.5);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
    for (double delta : deltas) {
        const double omega = modulus_of_continuity(f, delta);
        for (int trial = 0; trial < 256; ++trial) {
            const std::size_t i = pick(rng);
            const std::size_t j = pick(rng);
            const std::size_t gap = i > j ? i - j : j - i;
            const double distance = static_cast<double>(std::min(gap, m - gap)) * step;
            const double bound = omega * (distance / delta + 1.0) + 1e-10;
            ++report.pairs_checked;
            if (std::abs(f[i] - f[j]) > bound) {
                ++report.pair_violations;
            }
        }
    }
    return report;
}

}  // namespace fibstat
