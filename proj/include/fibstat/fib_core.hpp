#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fibstat/error.hpp"
#include "fibstat/exact.hpp"

namespace fibstat {

enum class FibConvention {
    OneOne,   ///< f_1 = f_2 = 1
    ZeroOne,  ///< f_0 = 0, f_1 = 1 (display only; indices are the same)
};

inline const double kGoldenRatio = (1.0 + std::sqrt(5.0)) / 2.0;

/// Exact Fibonacci numbers f_0..f_E plus binary64 ratio tables up to the
/// horizon N. Each ratio is one correctly rounded exact division.
///
/// Ordinarily E == N. A ratio cache (see build_ratio_cache) keeps fewer exact
/// values than ratios: once two consecutive ratios round to the same double,
/// every later ratio does too, because consecutive ratios are continued
/// fraction convergents of the golden ratio and nest around it.
class FibCache {
public:
    /// Largest index n with ratio data (f_{n}/f_{n+1} usable for n < N).
    std::size_t horizon() const noexcept { return horizon_; }
    /// Largest index n whose exact value is stored.
    std::size_t exact_horizon() const noexcept { return values_.size() - 1; }
    FibConvention convention() const noexcept { return convention_; }

    const Integer& value(std::size_t n) const {
        if (n > exact_horizon()) {
            throw HorizonError("Fibonacci value f_" + std::to_string(n) + " is beyond the exact horizon " +
                               std::to_string(exact_horizon()));
        }
        return values_[n];
    }

    /// The N cached terms as listed under the chosen convention.
    std::vector<Integer> terms() const {
        const std::size_t first = convention_ == FibConvention::OneOne ? 1 : 0;
        const std::size_t count = std::min(horizon_, exact_horizon() + 1 - first);
        return {values_.begin() + static_cast<std::ptrdiff_t>(first),
                values_.begin() + static_cast<std::ptrdiff_t>(first + count)};
    }

    /// f_{n+1}/f_n, 1 <= n < N.
    double ratio_up(std::size_t n) const {
        check_ratio_index(n);
        return up_[n];
    }

    /// f_n/f_{n+1}, 1 <= n < N.
    double ratio_down(std::size_t n) const {
        check_ratio_index(n);
        return down_[n];
    }

    friend FibCache build_fib_cache(std::size_t horizon, FibConvention convention);
    friend FibCache build_ratio_cache(std::size_t horizon, std::size_t exact_limit);

private:
    void check_ratio_index(std::size_t n) const {
        if (n == 0 || n >= horizon_) {
            throw HorizonError("ratio index " + std::to_string(n) + " outside 1.." +
                               std::to_string(horizon_ == 0 ? 0 : horizon_ - 1));
        }
    }

    static std::vector<Integer> exact_values(std::size_t last) {
        std::vector<Integer> values(last + 1);
        values[0] = 0;
        if (last >= 1) {
            values[1] = 1;
        }
        for (std::size_t n = 2; n <= last; ++n) {
            values[n] = values[n - 1] + values[n - 2];
        }
        return values;
    }

    void fill_ratios(std::size_t up_to) {
        up_.assign(horizon_, 0.0);
        down_.assign(horizon_, 0.0);
        for (std::size_t n = 1; n < up_to; ++n) {
            up_[n] = *quotient_to_double(values_[n + 1], values_[n]);
            down_[n] = *quotient_to_double(values_[n], values_[n + 1]);
        }
    }

    std::size_t horizon_ = 0;
    FibConvention convention_ = FibConvention::OneOne;
    std::vector<Integer> values_;
    std::vector<double> up_;
    std::vector<double> down_;
};

/// Exact cache of the first N Fibonacci numbers.
inline FibCache build_fib_cache(std::size_t horizon, FibConvention convention = FibConvention::OneOne) {
    if (horizon < 2) {
        throw InvalidHorizon("Fibonacci cache needs N >= 2, got " + std::to_string(horizon));
    }
    FibCache cache;
    cache.horizon_ = horizon;
    cache.convention_ = convention;
    cache.values_ = FibCache::exact_values(horizon);
    cache.fill_ratios(horizon);
    return cache;
}

/// Cache with ratio tables up to N but exact values only up to
/// max(exact_limit, 64). Intended for long double-precision transforms.
inline FibCache build_ratio_cache(std::size_t horizon, std::size_t exact_limit = 4096) {
    if (horizon < 2) {
        throw InvalidHorizon("Fibonacci cache needs N >= 2, got " + std::to_string(horizon));
    }
    const std::size_t exact = std::min(horizon, std::max<std::size_t>(exact_limit, 64));
    FibCache cache;
    cache.horizon_ = horizon;
    cache.values_ = FibCache::exact_values(exact);
    cache.fill_ratios(exact);
    if (exact < horizon) {
        const std::size_t last = exact - 1;
        if (cache.up_[last] != cache.up_[last - 1] || cache.down_[last] != cache.down_[last - 1]) {
            throw IntegrityError("Fibonacci ratios have not stabilised at the exact limit", last);
        }
        std::fill(cache.up_.begin() + static_cast<std::ptrdiff_t>(exact), cache.up_.end(), cache.up_[last]);
        std::fill(cache.down_.begin() + static_cast<std::ptrdiff_t>(exact), cache.down_.end(), cache.down_[last]);
    }
    return cache;
}

/// r_n = f_{n+1}/f_n for n = 1..N-1.
struct RatioSeq {
    std::vector<double> values;  // values[n - 1] == r_n

    double at(std::size_t n) const { return values.at(n - 1); }
    std::size_t size() const noexcept { return values.size(); }
};

inline RatioSeq ratios(const FibCache& cache) {
    if (cache.horizon() < 3) {
        throw InvalidHorizon("ratios need a cache with N >= 3");
    }
    RatioSeq seq;
    seq.values.reserve(cache.horizon() - 1);
    for (std::size_t n = 1; n < cache.horizon(); ++n) {
        seq.values.push_back(cache.ratio_up(n));
    }
    return seq;
}

/// Exact sum of 1/f_k for first <= k <= last, rounded once.
inline double reciprocal_sum(const FibCache& cache, std::size_t first, std::size_t last) {
    if (first == 0 || first > last) {
        throw DomainError("reciprocal_sum needs 1 <= first <= last");
    }
    Rational sum = 0;
    for (std::size_t k = first; k <= last; ++k) {
        sum += Rational(Integer(1), cache.value(k));
    }
    return *to_double(sum);
}

struct IdentityReport {
    std::size_t horizon = 0;
    std::size_t recurrence_checks = 0;
    std::size_t cassini_checks = 0;
    std::size_t cassini_variant_checks = 0;
    std::size_t prefix_sum_checks = 0;
    /// Sum_{k=1}^{N} 1/f_k, accumulated smallest term first.
    double reciprocal_partial_sum = 0.0;
    /// Last partial-sum gap 1/f_N.
    double reciprocal_last_gap = 0.0;
    double cauchy_tolerance = 0.0;
    /// Gaps strictly shrink and the last one is below the tolerance.
    bool reciprocal_cauchy = false;
};

/// Exact checks of the recurrence, Cassini's identity f_{n-1}f_{n+1} - f_n^2 =
/// (-1)^n, its substituted form f_{n-1}^2 + f_n f_{n-1} - f_n^2 = (-1)^n, and
/// f_1 + ... + f_n = f_{n+2} - 1. Throws IntegrityError at the first failure.
inline IdentityReport identity_audit(const FibCache& cache, double cauchy_tolerance = 1e-12) {
    const std::size_t n_max = cache.exact_horizon();
    if (n_max < 4 || cache.horizon() < 4) {
        throw InvalidHorizon("identity audit needs N >= 4");
    }
    IdentityReport report;
    report.horizon = n_max;
    report.cauchy_tolerance = cauchy_tolerance;

    auto f = [&](std::size_t n) -> const Integer& { return cache.value(n); };
    auto sign = [](std::size_t n) { return Integer(n % 2 == 0 ? 1 : -1); };

    for (std::size_t n = 2; n <= n_max; ++n) {
        if (f(n) != f(n - 1) + f(n - 2)) {
            throw IntegrityError("recurrence f_n = f_{n-1} + f_{n-2} violated", n);
        }
        ++report.recurrence_checks;
    }
    for (std::size_t n = 1; n < n_max; ++n) {
        if (f(n - 1) * f(n + 1) - f(n) * f(n) != sign(n)) {
            throw IntegrityError("Cassini identity violated", n);
        }
        ++report.cassini_checks;
    }
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (f(n - 1) * f(n - 1) + f(n) * f(n - 1) - f(n) * f(n) != sign(n)) {
            throw IntegrityError("substituted Cassini identity violated", n);
        }
        ++report.cassini_variant_checks;
    }
    Integer running = 0;
    for (std::size_t n = 1; n + 2 <= n_max; ++n) {
        running += f(n);
        if (running != f(n + 2) - 1) {
            throw IntegrityError("prefix sum identity violated", n);
        }
        ++report.prefix_sum_checks;
    }

    std::vector<double> gaps(n_max + 1, 0.0);
    for (std::size_t k = 1; k <= n_max; ++k) {
        gaps[k] = *quotient_to_double(Integer(1), f(k));
        // 1/f_k shrinks exactly when f_k grows; the doubles underflow past k ~ 1476.
        if (k >= 3 && !(f(k) > f(k - 1))) {
            throw IntegrityError("reciprocal partial-sum gaps do not shrink", k);
        }
    }
    long double sum = 0.0L;
    for (std::size_t k = n_max; k >= 1; --k) {
        sum += gaps[k];
    }
    report.reciprocal_partial_sum = static_cast<double>(sum);
    report.reciprocal_last_gap = gaps[n_max];
    report.reciprocal_cauchy = gaps[n_max] <= cauchy_tolerance;
    return report;
}

}  // namespace fibstat
