#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibstat/error.hpp"
#include "fibstat/exact.hpp"
#include "fibstat/fib_core.hpp"

namespace fibstat {

/// Finite prefix x_1..x_N of a real sequence (1-based access).
///
/// Only finite terms are stored. When a generator or transform exceeds the
/// binary64 range at index m, `overflow_at` is m and `terms` holds x_1..x_{m-1}.
template <class Value>
struct BasicSeqPrefix {
    std::string label;
    std::size_t horizon = 0;
    std::vector<Value> terms;
    std::optional<std::size_t> overflow_at;

    const Value& at(std::size_t n) const { return terms.at(n - 1); }
    std::size_t size() const noexcept { return terms.size(); }
    bool overflowed() const noexcept { return overflow_at.has_value(); }
};

using SeqPrefix = BasicSeqPrefix<double>;
using ExactSeqPrefix = BasicSeqPrefix<Rational>;

inline SeqPrefix make_prefix(std::string label, std::vector<double> terms) {
    for (double v : terms) {
        if (!std::isfinite(v)) {
            throw DomainError("sequence '" + label + "' contains a non-finite term");
        }
    }
    SeqPrefix seq;
    seq.label = std::move(label);
    seq.horizon = terms.size();
    seq.terms = std::move(terms);
    return seq;
}

/// Renders an exact prefix to doubles, flagging the first overflow.
inline SeqPrefix approximate(const ExactSeqPrefix& exact) {
    SeqPrefix seq;
    seq.label = exact.label;
    seq.horizon = exact.horizon;
    seq.terms.reserve(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const auto v = to_double(exact.terms[i]);
        if (!v) {
            seq.overflow_at = i + 1;
            break;
        }
        seq.terms.push_back(*v);
    }
    if (!seq.overflow_at && exact.overflow_at) {
        seq.overflow_at = exact.overflow_at;
    }
    return seq;
}

inline ExactSeqPrefix exact_prefix(const SeqPrefix& seq) {
    if (seq.overflowed()) {
        throw DomainError("cannot take an exact copy of an overflowed prefix");
    }
    ExactSeqPrefix exact;
    exact.label = seq.label;
    exact.horizon = seq.horizon;
    exact.terms.reserve(seq.size());
    for (double v : seq.terms) {
        exact.terms.push_back(exact_from_double(v));
    }
    return exact;
}

/// A prefix in binary64 plus, when the values need it, the exact prefix they
/// were rounded from. Transforms prefer the exact data.
struct SeqSample {
    SeqPrefix values;
    std::optional<ExactSeqPrefix> exact;

    std::size_t horizon() const noexcept { return values.horizon; }
    const std::string& label() const noexcept { return values.label; }
};

inline SeqSample sample_of(SeqPrefix values) { return {std::move(values), std::nullopt}; }

inline SeqSample sample_of(ExactSeqPrefix exact) {
    SeqPrefix values = approximate(exact);
    return {std::move(values), std::move(exact)};
}

struct TransformResult {
    std::vector<double> terms;
    std::optional<std::size_t> overflow_at;

    double at(std::size_t n) const { return terms.at(n - 1); }
    std::size_t size() const noexcept { return terms.size(); }

    SeqPrefix as_prefix(std::string label, std::size_t horizon) const {
        return {std::move(label), horizon, terms, overflow_at};
    }
};

namespace detail {

inline void require_ratio_horizon(const FibCache& cache, std::size_t n) {
    if (cache.horizon() < n + 1) {
        throw HorizonError("transform of length " + std::to_string(n) + " needs a Fibonacci cache with N >= " +
                           std::to_string(n + 1) + ", have " + std::to_string(cache.horizon()));
    }
}

inline void require_exact_horizon(const FibCache& cache, std::size_t n) {
    if (cache.exact_horizon() < n + 1) {
        throw HorizonError("exact transform of length " + std::to_string(n) +
                           " needs exact Fibonacci values up to f_" + std::to_string(n + 1) + ", have f_" +
                           std::to_string(cache.exact_horizon()));
    }
}

}  // namespace detail

/// (F x)_1 = x_1 and (F x)_n = (f_n/f_{n+1}) x_n - (f_{n+1}/f_n) x_{n-1}.
///
/// Binary64 route: coefficients are the cache's correctly rounded ratios.
/// An overflowed input stops the output at the same index.
inline TransformResult fib_difference_transform(const SeqPrefix& x, const FibCache& cache) {
    const std::size_t n_terms = x.size();
    detail::require_ratio_horizon(cache, n_terms);
    TransformResult out;
    out.terms.reserve(n_terms);
    for (std::size_t n = 1; n <= n_terms; ++n) {
        double v = 0.0;
        if (n == 1) {
            v = cache.ratio_down(1) * x.at(1);
        } else {
            v = cache.ratio_down(n) * x.at(n) - cache.ratio_up(n) * x.at(n - 1);
        }
        if (!std::isfinite(v)) {
            out.overflow_at = n;
            return out;
        }
        out.terms.push_back(v == 0.0 ? 0.0 : v);
    }
    if (x.overflow_at) {
        out.overflow_at = x.overflow_at;
    }
    return out;
}

/// The transform in exact rational arithmetic, no rounding.
inline ExactSeqPrefix exact_fib_difference(const ExactSeqPrefix& x, const FibCache& cache) {
    detail::require_exact_horizon(cache, x.size());
    ExactSeqPrefix out;
    out.label = "F(" + x.label + ")";
    out.horizon = x.horizon;
    out.terms.reserve(x.size());
    for (std::size_t n = 1; n <= x.size(); ++n) {
        const Integer& fn = cache.value(n);
        const Integer& fn1 = cache.value(n + 1);
        if (n == 1) {
            out.terms.push_back(Rational(fn, fn1) * x.at(1));
        } else {
            // (f_n^2 x_n - f_{n+1}^2 x_{n-1}) / (f_n f_{n+1})
            Rational numer = Rational(fn * fn) * x.at(n) - Rational(fn1 * fn1) * x.at(n - 1);
            out.terms.push_back(numer / Rational(fn * fn1));
        }
    }
    return out;
}

/// Exact route: every entry is computed exactly and rounded once. The
/// quotient is rounded from an unreduced numerator/denominator pair, which
/// skips the gcd work of full rational arithmetic.
inline TransformResult fib_difference_transform(const ExactSeqPrefix& x, const FibCache& cache) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    detail::require_exact_horizon(cache, x.size());
    TransformResult out;
    out.terms.reserve(x.size());
    for (std::size_t n = 1; n <= x.size(); ++n) {
        const Integer& fn = cache.value(n);
        const Integer& fn1 = cache.value(n + 1);
        const Integer& p = numerator(x.at(n));
        const Integer& q = denominator(x.at(n));
        std::optional<double> v;
        if (n == 1) {
            v = quotient_to_double(fn * p, fn1 * q);
        } else {
            const Integer& pp = numerator(x.at(n - 1));
            const Integer& qp = denominator(x.at(n - 1));
            const Integer num = fn * fn * p * qp - fn1 * fn1 * pp * q;
            v = quotient_to_double(num, fn * fn1 * q * qp);
        }
        if (!v) {
            out.overflow_at = n;
            return out;
        }
        out.terms.push_back(*v);
    }
    return out;
}

/// Uses the exact data when the sample carries it.
inline TransformResult fib_difference_transform(const SeqSample& x, const FibCache& cache) {
    if (x.exact) {
        return fib_difference_transform(*x.exact, cache);
    }
    return fib_difference_transform(x.values, cache);
}

/// Forward substitution on the bidiagonal system:
/// x_1 = b_1, x_n = (f_{n+1}/f_n)(b_n + (f_{n+1}/f_n) x_{n-1}).
///
/// The inverse amplifies perturbations of early b_n by about golden^(2(N-n)),
/// so in binary64 it only round-trips for short or cancellation-free inputs;
/// use the exact overload for round trips.
inline SeqPrefix inverse_transform(const SeqPrefix& b, const FibCache& cache) {
    detail::require_ratio_horizon(cache, b.size());
    SeqPrefix x;
    x.label = "Finv(" + b.label + ")";
    x.horizon = b.horizon;
    x.terms.reserve(b.size());
    double previous = 0.0;
    for (std::size_t n = 1; n <= b.size(); ++n) {
        double v = 0.0;
        if (n == 1) {
            v = cache.ratio_up(1) * b.at(1);
        } else {
            const double r = cache.ratio_up(n);
            v = r * (b.at(n) + r * previous);
        }
        if (!std::isfinite(v)) {
            x.overflow_at = n;
            return x;
        }
        x.terms.push_back(v);
        previous = v;
    }
    if (b.overflow_at) {
        x.overflow_at = b.overflow_at;
    }
    return x;
}

inline ExactSeqPrefix inverse_transform(const ExactSeqPrefix& b, const FibCache& cache) {
    detail::require_exact_horizon(cache, b.size());
    ExactSeqPrefix x;
    x.label = "Finv(" + b.label + ")";
    x.horizon = b.horizon;
    x.terms.reserve(b.size());
    for (std::size_t n = 1; n <= b.size(); ++n) {
        const Rational r(cache.value(n + 1), cache.value(n));
        if (n == 1) {
            x.terms.push_back(r * b.at(1));
        } else {
            x.terms.push_back(r * (b.at(n) + r * x.terms.back()));
        }
    }
    return x;
}

struct FrechetDistance {
    double value = 0.0;
    /// Bound 2^-K on the omitted tail.
    double truncation_bound = 0.0;
    std::size_t order = 0;
};

/// sum_{k=1}^{K} 2^-k |x_k - y_k| / (1 + |x_k - y_k|).
inline FrechetDistance frechet_distance(const SeqPrefix& x, const SeqPrefix& y, std::optional<std::size_t> order = {}) {
    const std::size_t available = std::min(x.size(), y.size());
    const std::size_t k_max = order.value_or(std::min<std::size_t>(available, 64));
    if (k_max > available) {
        throw DomainError("frechet_distance: truncation order exceeds the shorter prefix");
    }
    FrechetDistance d;
    d.order = k_max;
    double weight = 1.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        weight *= 0.5;
        const double diff = std::abs(x.at(k) - y.at(k));
        d.value += weight * diff / (1.0 + diff);
    }
    d.truncation_bound = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k_max, 1074)));
    return d;
}

enum class Witness {
    FibSquares,   ///< x_n = f_{n+1}^2
    Alt01,        ///< (1, 0, 1, 0, ...)
    CharSquares,  ///< 1 iff n is a square
    NLinear,      ///< x_n = n
    NOnSquares,   ///< x_n = n iff n is a square, else 0
    OddEven,      ///< 1 iff n is odd
};

inline constexpr Witness kAllWitnesses[] = {Witness::FibSquares, Witness::Alt01,   Witness::CharSquares,
                                            Witness::NLinear,    Witness::NOnSquares, Witness::OddEven};

inline std::string_view witness_name(Witness w) {
    switch (w) {
        case Witness::FibSquares: return "fib-squares";
        case Witness::Alt01: return "alt01";
        case Witness::CharSquares: return "char-squares";
        case Witness::NLinear: return "n-linear";
        case Witness::NOnSquares: return "n-on-squares";
        case Witness::OddEven: return "odd-even";
    }
    return "unknown";
}

inline Witness parse_witness(std::string_view name) {
    for (Witness w : kAllWitnesses) {
        if (witness_name(w) == name) {
            return w;
        }
    }
    throw DomainError("unknown witness '" + std::string(name) + "'");
}

inline bool is_square(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return r * r == n;
}

namespace detail {

/// Integer-valued witnesses other than fib-squares.
inline std::int64_t small_witness_term(Witness w, std::uint64_t n) {
    switch (w) {
        case Witness::Alt01:
        case Witness::OddEven: return n % 2 == 1 ? 1 : 0;
        case Witness::CharSquares: return is_square(n) ? 1 : 0;
        case Witness::NLinear: return static_cast<std::int64_t>(n);
        case Witness::NOnSquares: return is_square(n) ? static_cast<std::int64_t>(n) : 0;
        case Witness::FibSquares: break;
    }
    throw DomainError("fib-squares has no small closed form");
}

}  // namespace detail

/// The named witness prefix in binary64 (fib-squares overflows at n = 739).
inline SeqPrefix witness(Witness w, std::size_t horizon) {
    if (horizon < 1) {
        throw InvalidHorizon("witness needs N >= 1");
    }
    SeqPrefix seq;
    seq.label = std::string(witness_name(w));
    seq.horizon = horizon;
    seq.terms.reserve(std::min<std::size_t>(horizon, 1u << 20));
    if (w == Witness::FibSquares) {
        Integer prev = 1;  // f_1
        Integer curr = 1;  // f_2
        for (std::size_t n = 1; n <= horizon; ++n) {
            const auto v = to_double(Integer(curr * curr));
            if (!v) {
                seq.overflow_at = n;
                break;
            }
            seq.terms.push_back(*v);
            Integer next = prev + curr;
            prev = std::move(curr);
            curr = std::move(next);
        }
        return seq;
    }
    for (std::size_t n = 1; n <= horizon; ++n) {
        seq.terms.push_back(static_cast<double>(detail::small_witness_term(w, n)));
    }
    return seq;
}

inline SeqPrefix witness(std::string_view name, std::size_t horizon) { return witness(parse_witness(name), horizon); }

/// The named witness with exact integer terms.
inline ExactSeqPrefix exact_witness(Witness w, std::size_t horizon) {
    if (horizon < 1) {
        throw InvalidHorizon("witness needs N >= 1");
    }
    ExactSeqPrefix seq;
    seq.label = std::string(witness_name(w));
    seq.horizon = horizon;
    seq.terms.reserve(horizon);
    if (w == Witness::FibSquares) {
        Integer prev = 1;
        Integer curr = 1;
        for (std::size_t n = 1; n <= horizon; ++n) {
            seq.terms.emplace_back(curr * curr);
            Integer next = prev + curr;
            prev = std::move(curr);
            curr = std::move(next);
        }
        return seq;
    }
    for (std::size_t n = 1; n <= horizon; ++n) {
        seq.terms.emplace_back(detail::small_witness_term(w, n));
    }
    return seq;
}

/// Witness sample for transforms. fib-squares leaves the 53-bit
/// integer range at n = 39, so it carries exact data, with the horizon
/// capped at `exact_limit`.
inline SeqSample witness_sample(Witness w, std::size_t horizon, std::size_t exact_limit = 4096) {
    if (w != Witness::FibSquares) {
        return sample_of(witness(w, horizon));
    }
    return sample_of(exact_witness(w, std::min(horizon, exact_limit)));
}

inline SeqPrefix constant_sequence(double c, std::size_t horizon) {
    SeqPrefix seq = make_prefix("constant", std::vector<double>(horizon, c));
    return seq;
}

}  // namespace fibstat
