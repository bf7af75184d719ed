#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fibstat/error.hpp"
#include "fibstat/exact.hpp"
#include "fibstat/fib_core.hpp"
#include "fibstat/sequence.hpp"
#include "fibstat/stat_convergence.hpp"

namespace fibstat {

/// Samples of a 2pi-periodic function at x_j = -pi + 2 pi j / M, j = 0..M-1.
struct GridFunction {
    std::vector<double> samples;

    std::size_t size() const noexcept { return samples.size(); }
    double operator[](std::size_t j) const { return samples[j]; }

    static double node(std::size_t j, std::size_t grid_size) {
        return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid_size);
    }
};

namespace detail {

inline void check_grid_size(std::size_t grid_size) {
    if (grid_size < 8 || (grid_size & (grid_size - 1)) != 0) {
        throw DomainError("grid size M must be a power of two >= 8, got " + std::to_string(grid_size));
    }
}

inline void check_grid_function(const GridFunction& f) {
    check_grid_size(f.size());
}

inline void check_same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.size() != g.size()) {
        throw DomainError("grid functions live on different grids");
    }
}

/// cos/sin(2 pi m / M), m = 0..M-1, built from the first quadrant so that the
/// symmetric values agree bit for bit.
struct TrigTable {
    std::size_t grid_size = 0;
    std::vector<double> cos_table;
    std::vector<double> sin_table;

    explicit TrigTable(std::size_t m) : grid_size(m), cos_table(m), sin_table(m) {
        const std::size_t quarter = m / 4;
        for (std::size_t i = 0; i <= quarter; ++i) {
            // Angle 2 pi i / M in [0, pi/2]; use the closer of the two direct evaluations.
            const std::size_t mirror = quarter - i;
            double c = 0.0;
            double s = 0.0;
            if (i <= mirror) {
                const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
                c = std::cos(a);
                s = std::sin(a);
            } else {
                const double a = 2.0 * std::numbers::pi * static_cast<double>(mirror) / static_cast<double>(m);
                c = std::sin(a);
                s = std::cos(a);
            }
            cos_table[i] = c;
            sin_table[i] = s;
        }
        for (std::size_t i = quarter + 1; i < m; ++i) {
            // cos(t + pi/2) = -sin t, sin(t + pi/2) = cos t
            cos_table[i] = -sin_table[i - quarter];
            sin_table[i] = cos_table[i - quarter];
        }
    }

    /// cos(k x_j) with x_j = -pi + 2 pi j / M.
    double cos_at(std::size_t k, std::size_t j) const {
        const double v = cos_table[(k * j) % grid_size];
        return k % 2 == 0 ? v : -v;
    }

    double sin_at(std::size_t k, std::size_t j) const {
        const double v = sin_table[(k * j) % grid_size];
        return k % 2 == 0 ? v : -v;
    }
};

}  // namespace detail

template <class Fn>
GridFunction sample_function(Fn&& fn, std::size_t grid_size = 1024) {
    detail::check_grid_size(grid_size);
    GridFunction f;
    f.samples.resize(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double v = fn(GridFunction::node(j, grid_size));
        if (!std::isfinite(v)) {
            throw DomainError("grid function sample is not finite");
        }
        f.samples[j] = v;
    }
    return f;
}

inline GridFunction constant_function(double c, std::size_t grid_size = 1024) {
    return sample_function([c](double) { return c; }, grid_size);
}

/// Pure harmonic cos(kx) or sin(kx) from the exact grid tables.
inline GridFunction harmonic(std::size_t k, bool sine, std::size_t grid_size = 1024) {
    detail::check_grid_size(grid_size);
    const detail::TrigTable table(grid_size);
    GridFunction f;
    f.samples.resize(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        f.samples[j] = sine ? table.sin_at(k, j) : table.cos_at(k, j);
    }
    return f;
}

inline constexpr std::string_view kTargetNames[] = {"one",     "sin",     "cos", "sin2", "abs-sin", "abs-sin-smoothed",
                                                    "sawtooth-smoothed"};

/// Named targets. abs-sin-smoothed = sqrt(sin^2 + 0.01); sawtooth-smoothed is
/// the Fourier series sum_k 0.9^k sin(kx)/k in closed form.
inline GridFunction target_function(std::string_view name, std::size_t grid_size = 1024) {
    if (name == "one") return constant_function(1.0, grid_size);
    if (name == "sin") return harmonic(1, true, grid_size);
    if (name == "cos") return harmonic(1, false, grid_size);
    if (name == "sin2") {
        GridFunction s = harmonic(1, true, grid_size);
        for (double& v : s.samples) {
            v *= v;
        }
        return s;
    }
    if (name == "abs-sin") return sample_function([](double x) { return std::abs(std::sin(x)); }, grid_size);
    if (name == "abs-sin-smoothed") {
        return sample_function([](double x) { return std::sqrt(std::sin(x) * std::sin(x) + 0.01); }, grid_size);
    }
    if (name == "sawtooth-smoothed") {
        return sample_function([](double x) { return std::atan2(0.9 * std::sin(x), 1.0 - 0.9 * std::cos(x)); },
                               grid_size);
    }
    throw DomainError("unknown target '" + std::string(name) + "'");
}

/// Grid sup-norm max_j |f(x_j)|.
inline double sup_norm_2pi(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.samples) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

inline GridFunction operator-(const GridFunction& f, const GridFunction& g) {
    detail::check_same_grid(f, g);
    GridFunction h = f;
    for (std::size_t j = 0; j < h.size(); ++j) {
        h.samples[j] -= g.samples[j];
    }
    return h;
}

inline GridFunction linear_combination(double alpha, const GridFunction& f, double beta, const GridFunction& g) {
    detail::check_same_grid(f, g);
    GridFunction h = f;
    for (std::size_t j = 0; j < h.size(); ++j) {
        h.samples[j] = alpha * f.samples[j] + beta * g.samples[j];
    }
    return h;
}

/// Trapezoid Fourier coefficients a_0..a_n, b_0..b_n (b_0 = 0). For k >= 1
/// the mean is removed before the quadrature, which leaves the values
/// unchanged in exact arithmetic and makes constants reproduce exactly.
struct FourierCoeffs {
    std::vector<double> a;
    std::vector<double> b;

    std::size_t order() const noexcept { return a.empty() ? 0 : a.size() - 1; }
};

namespace detail {

inline void check_order(std::size_t n, std::size_t grid_size) {
    if (n >= grid_size / 2) {
        throw DomainError("order " + std::to_string(n) + " is too large for a grid of " + std::to_string(grid_size) +
                          " points (need n < M/2)");
    }
}

inline FourierCoeffs coefficients(const GridFunction& f, std::size_t n, const TrigTable& table) {
    const std::size_t m = f.size();
    FourierCoeffs c;
    c.a.assign(n + 1, 0.0);
    c.b.assign(n + 1, 0.0);
    double total = 0.0;
    for (double v : f.samples) {
        total += v;
    }
    const double mean = total / static_cast<double>(m);
    c.a[0] = 2.0 * mean;
    std::vector<double> centred(m);
    for (std::size_t j = 0; j < m; ++j) {
        centred[j] = f.samples[j] - mean;
    }
    const double scale = 2.0 / static_cast<double>(m);
    for (std::size_t k = 1; k <= n; ++k) {
        double ak = 0.0;
        double bk = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            ak += centred[j] * table.cos_at(k, j);
            bk += centred[j] * table.sin_at(k, j);
        }
        c.a[k] = ak * scale;
        c.b[k] = bk * scale;
    }
    return c;
}

}  // namespace detail

inline FourierCoeffs fourier_coefficients(const GridFunction& f, std::size_t n) {
    detail::check_grid_function(f);
    detail::check_order(n, f.size());
    return detail::coefficients(f, n, detail::TrigTable(f.size()));
}

/// S_n(f, x) = a_0/2 + sum_{k=1}^{n} (a_k cos kx + b_k sin kx) on the grid.
inline GridFunction fourier_partial_sum(const GridFunction& f, std::size_t n) {
    detail::check_grid_function(f);
    detail::check_order(n, f.size());
    const detail::TrigTable table(f.size());
    const FourierCoeffs c = detail::coefficients(f, n, table);
    GridFunction s;
    s.samples.assign(f.size(), c.a[0] / 2.0);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            s.samples[j] += c.a[k] * table.cos_at(k, j) + c.b[k] * table.sin_at(k, j);
        }
    }
    return s;
}

enum class FejerMethod { Average, Kernel };

/// phi_n(s) = sin^2((n+1)s/2) / ((n+1) sin^2(s/2)), and n+1 at multiples of 2 pi.
inline double fejer_kernel(std::size_t n, double s) {
    const double half = std::sin(s / 2.0);
    const double np1 = static_cast<double>(n + 1);
    if (std::abs(half) < 1e-300 || std::remainder(s, 2.0 * std::numbers::pi) == 0.0) {
        return np1;
    }
    const double top = std::sin(np1 * s / 2.0);
    return top * top / (np1 * half * half);
}

/// Fejer mean F_n(f). Average: the arithmetic mean of S_0..S_n. Kernel:
/// trapezoid quadrature of (1/2pi) int f(t) phi_n(x - t) dt.
inline GridFunction fejer_mean(const GridFunction& f, std::size_t n, FejerMethod method = FejerMethod::Average) {
    detail::check_grid_function(f);
    detail::check_order(n, f.size());
    const std::size_t m = f.size();
    GridFunction out;
    if (method == FejerMethod::Average) {
        const detail::TrigTable table(m);
        const FourierCoeffs c = detail::coefficients(f, n, table);
        std::vector<double> partial(m, c.a[0] / 2.0);
        std::vector<double> total = partial;
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                partial[j] += c.a[k] * table.cos_at(k, j) + c.b[k] * table.sin_at(k, j);
                total[j] += partial[j];
            }
        }
        out.samples.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            out.samples[j] = total[j] / static_cast<double>(n + 1);
        }
        return out;
    }
    std::vector<double> kernel(m);
    kernel[0] = static_cast<double>(n + 1);
    for (std::size_t d = 1; d < m; ++d) {
        kernel[d] = fejer_kernel(n, 2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(m));
    }
    out.samples.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += f.samples[j] * kernel[(i + m - j) % m];
        }
        out.samples[i] = acc / static_cast<double>(m);
    }
    return out;
}

/// A sequence of linear operators on grid functions, k = 1, 2, ...
///
/// When `exact_scale` is set, L_k = s_k B_k with s_k an exact rational and
/// B_k = `base`; error sequences are then evaluated exactly against B_k.
struct OperatorFamily {
    std::string name;
    std::function<GridFunction(std::size_t, const GridFunction&)> apply;
    bool claimed_positive = true;
    std::function<Rational(std::size_t)> exact_scale;
    std::function<GridFunction(std::size_t, const GridFunction&)> base;

    GridFunction operator()(std::size_t k, const GridFunction& f) const { return apply(k, f); }
};

inline OperatorFamily fejer_family(FejerMethod method = FejerMethod::Average) {
    OperatorFamily family;
    family.name = method == FejerMethod::Average ? "fejer" : "fejer-kernel";
    family.apply = [method](std::size_t k, const GridFunction& f) { return fejer_mean(f, k, method); };
    return family;
}

inline OperatorFamily identity_family() {
    OperatorFamily family;
    family.name = "identity";
    family.apply = [](std::size_t, const GridFunction& f) { return f; };
    return family;
}

/// K_k(f) = (1 + y_k) F_k(f).
inline OperatorFamily paper_example_operator(const ExactSeqPrefix& y) {
    auto scales = std::make_shared<std::vector<Rational>>();
    scales->reserve(y.size());
    for (const Rational& v : y.terms) {
        if (v <= -1) {
            throw DomainError("paper example operator needs 1 + y_k > 0");
        }
        scales->push_back(Rational(1) + v);
    }
    OperatorFamily family;
    family.name = "paper-example";
    family.exact_scale = [scales](std::size_t k) -> Rational {
        if (k == 0 || k > scales->size()) {
            throw HorizonError("paper example operator defined for 1 <= k <= " + std::to_string(scales->size()));
        }
        return (*scales)[k - 1];
    };
    family.base = [](std::size_t k, const GridFunction& f) { return fejer_mean(f, k); };
    family.apply = [scale = family.exact_scale](std::size_t k, const GridFunction& f) {
        const double s = to_double(scale(k)).value_or(std::numeric_limits<double>::infinity());
        GridFunction out = fejer_mean(f, k);
        for (double& v : out.samples) {
            v *= s;
        }
        return out;
    };
    return family;
}

inline OperatorFamily paper_example_operator(const SeqPrefix& y) {
    if (y.overflowed()) {
        throw DomainError("paper example operator needs a finite y prefix");
    }
    return paper_example_operator(exact_prefix(y));
}

/// The family with y_k = f_{k+1}^2, k = 1..K.
inline OperatorFamily paper_example_operator(std::size_t max_index) {
    return paper_example_operator(exact_witness(Witness::FibSquares, max_index));
}

inline OperatorFamily family_by_name(std::string_view name, std::size_t max_index) {
    if (name == "fejer") return fejer_family(FejerMethod::Average);
    if (name == "fejer-kernel") return fejer_family(FejerMethod::Kernel);
    if (name == "identity") return identity_family();
    if (name == "paper-example" || name == "kn") return paper_example_operator(max_index);
    throw DomainError("unknown operator family '" + std::string(name) + "'");
}

/// L_k(psi(., x), x) with psi(t) = sin^2((t - x)/2), through
/// (1/2)[L_k(1) - cos x L_k(cos) - sin x L_k(sin)].
inline GridFunction second_moment(const OperatorFamily& family, std::size_t k, std::size_t grid_size = 1024) {
    const GridFunction one = constant_function(1.0, grid_size);
    const GridFunction c = harmonic(1, false, grid_size);
    const GridFunction s = harmonic(1, true, grid_size);
    const GridFunction l1 = family(k, one);
    const GridFunction lc = family(k, c);
    const GridFunction ls = family(k, s);
    GridFunction out;
    out.samples.resize(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        out.samples[j] = 0.5 * (l1[j] - c[j] * lc[j] - s[j] * ls[j]);
    }
    return out;
}

struct SpotCheck {
    std::size_t index = 0;
    double linearity_error = 0.0;
    double min_on_nonnegative = 0.0;
    bool linear = true;
    bool positive = true;
};

/// Linearity and (when claimed) positivity on random inputs. Tolerances are
/// 1e-10 relative to max(1, |output|), so scaled families are judged fairly.
inline SpotCheck spot_check(const OperatorFamily& family, std::size_t k, std::size_t grid_size = 1024,
                            std::uint64_t seed = 20240611, std::size_t trials = 3) {
    std::mt19937_64 rng(seed + k);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto random_trig = [&](bool nonnegative) {
        std::vector<double> a(6);
        std::vector<double> b(6);
        for (std::size_t h = 0; h < a.size(); ++h) {
            a[h] = coef(rng) / static_cast<double>(h + 1);
            b[h] = coef(rng) / static_cast<double>(h + 1);
        }
        GridFunction f = sample_function(
            [&](double x) {
                double v = 0.0;
                for (std::size_t h = 0; h < a.size(); ++h) {
                    v += a[h] * std::cos(static_cast<double>(h) * x) + b[h] * std::sin(static_cast<double>(h) * x);
                }
                return v;
            },
            grid_size);
        if (nonnegative) {
            for (double& v : f.samples) {
                v = std::max(0.0, v);
            }
        }
        return f;
    };
    SpotCheck check;
    check.index = k;
    check.min_on_nonnegative = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        const GridFunction f = random_trig(false);
        const GridFunction g = random_trig(false);
        const double alpha = coef(rng);
        const double beta = coef(rng);
        const GridFunction lhs = family(k, linear_combination(alpha, f, beta, g));
        const GridFunction rhs = linear_combination(alpha, family(k, f), beta, family(k, g));
        const double err = sup_norm_2pi(lhs - rhs);
        const double scale = std::max({1.0, sup_norm_2pi(lhs), sup_norm_2pi(rhs)});
        check.linearity_error = std::max(check.linearity_error, err / scale);
        if (family.claimed_positive) {
            GridFunction p = random_trig(true);
            for (double& v : p.samples) {
                v += unit(rng) < 0.1 ? unit(rng) : 0.0;
            }
            const GridFunction lp = family(k, p);
            const double lo = *std::min_element(lp.samples.begin(), lp.samples.end());
            check.min_on_nonnegative = std::min(check.min_on_nonnegative, lo);
            if (lo < -1e-10 * std::max(1.0, sup_norm_2pi(lp))) {
                check.positive = false;
            }
        }
    }
    check.linear = check.linearity_error <= 1e-10;
    if (!family.claimed_positive) {
        check.min_on_nonnegative = 0.0;
    }
    return check;
}

enum class Convergence { Convergent, Divergent, Inconclusive };

inline std::string_view to_string(Convergence c) {
    switch (c) {
        case Convergence::Convergent: return "convergent";
        case Convergence::Divergent: return "divergent";
        case Convergence::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

inline Convergence convergence_of(const StatVerdict& v) {
    switch (v.classification) {
        case StatClass::StatConvergent: return Convergence::Convergent;
        case StatClass::Inconclusive: return Convergence::Inconclusive;
        default: return Convergence::Divergent;
    }
}

/// Classical limit-0 verdict from window sups over [K/8,K/4], [K/4,K/2], [K/2,K].
struct ClassicalVerdict {
    Convergence verdict = Convergence::Inconclusive;
    double early = 0.0;
    double middle = 0.0;
    double late = 0.0;
    double threshold = 0.0;
    std::string reason;
};

inline ClassicalVerdict classical_verdict(const SeqPrefix& e, std::size_t horizon, double threshold) {
    ClassicalVerdict v;
    v.threshold = threshold;
    if (e.overflow_at && *e.overflow_at <= horizon) {
        v.verdict = Convergence::Divergent;
        v.reason = "binary64 overflow at k = " + std::to_string(*e.overflow_at);
        return v;
    }
    auto window_sup = [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t k = std::max<std::size_t>(1, lo); k <= hi; ++k) {
            m = std::max(m, std::abs(e.terms[k - 1]));
        }
        return m;
    };
    v.early = window_sup(horizon / 8, horizon / 4);
    v.middle = window_sup(horizon / 4, horizon / 2);
    v.late = window_sup(horizon / 2, horizon);
    if (v.late <= threshold && v.late <= v.middle && v.middle <= v.early) {
        v.verdict = Convergence::Convergent;
        v.reason = "window sups shrink and the last is below the smallest epsilon";
    } else if (v.late > threshold && v.late >= v.middle) {
        v.verdict = Convergence::Divergent;
        v.reason = "last window sup is above the smallest epsilon and not shrinking";
    } else {
        v.verdict = Convergence::Inconclusive;
        v.reason = "window sups are not decisive";
    }
    return v;
}

struct ErrorRecord {
    std::string function;
    bool test_function = false;
    /// e_k = ||L_k(g) - g||, k = 1..K.
    SeqSample errors;
    SeqPrefix transformed;
    ClassicalVerdict classical;
    StatVerdict statistical;
    StatVerdict fib_statistical;

    Convergence verdict(std::string_view mode) const {
        if (mode == "classical") return classical.verdict;
        if (mode == "statistical") return convergence_of(statistical);
        return convergence_of(fib_statistical);
    }
};

struct ImplicationCheck {
    std::string mode;
    Convergence k1 = Convergence::Inconclusive;
    Convergence k2 = Convergence::Inconclusive;
    Convergence k3 = Convergence::Inconclusive;
    /// Every target converges.
    Convergence k0 = Convergence::Inconclusive;
    /// Not (k1, k2, k3 all convergent while a target diverges).
    bool forward_consistent = true;
    /// Not (k0 convergent while a test function diverges).
    bool converse_consistent = true;
};

struct KorovkinReport {
    std::string family;
    std::size_t max_index = 0;
    std::size_t grid_size = 0;
    std::vector<double> epsilon_grid;
    std::vector<SpotCheck> spot_checks;
    std::vector<ErrorRecord> records;
    std::vector<ImplicationCheck> implications;

    const ErrorRecord& record(std::string_view function) const {
        for (const auto& r : records) {
            if (r.function == function) {
                return r;
            }
        }
        throw DomainError("no error record for '" + std::string(function) + "'");
    }
};

/// e_k(g) for k = 1..K. Exact-scale families are evaluated exactly at the
/// grid points where the binary64 error is largest, then rounded once.
inline SeqSample error_sequence(const OperatorFamily& family, const GridFunction& g, std::size_t max_index,
                                std::string label) {
    if (!family.exact_scale) {
        SeqPrefix e;
        e.label = std::move(label);
        e.horizon = max_index;
        e.terms.reserve(max_index);
        for (std::size_t k = 1; k <= max_index; ++k) {
            const double v = sup_norm_2pi(family(k, g) - g);
            if (!std::isfinite(v)) {
                e.overflow_at = k;
                break;
            }
            e.terms.push_back(v);
        }
        return sample_of(std::move(e));
    }
    ExactSeqPrefix e;
    e.label = std::move(label);
    e.horizon = max_index;
    e.terms.reserve(max_index);
    const std::size_t m = g.size();
    std::vector<std::size_t> order(m);
    for (std::size_t k = 1; k <= max_index; ++k) {
        const Rational scale = family.exact_scale(k);
        const GridFunction b = family.base(k, g);
        const double s = to_double(scale).value_or(std::numeric_limits<double>::max());
        std::vector<double> approx(m);
        for (std::size_t j = 0; j < m; ++j) {
            approx[j] = std::abs(s * b[j] - g[j]);
        }
        for (std::size_t j = 0; j < m; ++j) {
            order[j] = j;
        }
        const std::size_t keep = std::min<std::size_t>(8, m);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                          [&](std::size_t x, std::size_t y) { return approx[x] > approx[y] || (approx[x] == approx[y] && x < y); });
        Rational best = 0;
        for (std::size_t i = 0; i < keep; ++i) {
            const std::size_t j = order[i];
            Rational d = scale * exact_from_double(b[j]) - exact_from_double(g[j]);
            if (d < 0) {
                d = -d;
            }
            if (d > best) {
                best = d;
            }
        }
        e.terms.push_back(best);
    }
    return sample_of(std::move(e));
}

namespace detail {

inline Convergence all_converge(const std::vector<Convergence>& vs) {
    bool any_inconclusive = false;
    for (Convergence c : vs) {
        if (c == Convergence::Divergent) return Convergence::Divergent;
        any_inconclusive = any_inconclusive || c == Convergence::Inconclusive;
    }
    return any_inconclusive ? Convergence::Inconclusive : Convergence::Convergent;
}

}  // namespace detail

struct KorovkinConfig {
    std::size_t grid_size = 1024;
    std::vector<double> epsilon_grid{0.5, 0.25, 0.1, 0.05};
    StatConfig stat;
    std::size_t spot_check_indices = 4;
};

/// Error sequences for the test functions 1, sin, cos and each target, with
/// classical, statistical and F-statistical verdicts (limit 0), and a check
/// that the observations are consistent with the Korovkin equivalence.
inline KorovkinReport korovkin_audit(const OperatorFamily& family, const std::vector<std::pair<std::string, GridFunction>>& targets,
                                     std::size_t max_index, const FibCache& cache, const KorovkinConfig& config = {}) {
    if (max_index < 100) {
        throw InvalidHorizon("korovkin_audit needs K >= 100, got " + std::to_string(max_index));
    }
    detail::check_grid(config.epsilon_grid);
    detail::check_grid_size(config.grid_size);
    if (max_index >= config.grid_size / 2) {
        throw DomainError("K must stay below M/2");
    }
    KorovkinReport report;
    report.family = family.name;
    report.max_index = max_index;
    report.grid_size = config.grid_size;
    report.epsilon_grid = config.epsilon_grid;

    for (std::size_t i = 0; i < config.spot_check_indices; ++i) {
        const std::size_t k = 1 + i * (max_index - 1) / std::max<std::size_t>(1, config.spot_check_indices - 1);
        SpotCheck check = spot_check(family, k, config.grid_size);
        report.spot_checks.push_back(check);
        if (!check.positive) {
            throw OperatorCheckError("operator family '" + family.name + "' fails the positivity check at k = " +
                                     std::to_string(k) + " (min " + std::to_string(check.min_on_nonnegative) + ")");
        }
        if (!check.linear) {
            throw OperatorCheckError("operator family '" + family.name + "' fails the linearity check at k = " +
                                     std::to_string(k));
        }
    }

    const double eps_min = *std::min_element(config.epsilon_grid.begin(), config.epsilon_grid.end());
    auto make_record = [&](std::string name, const GridFunction& g, bool test) {
        if (g.size() != config.grid_size) {
            throw DomainError("target '" + name + "' is not sampled on the audit grid");
        }
        ErrorRecord r;
        r.function = name;
        r.test_function = test;
        r.errors = error_sequence(family, g, max_index, "e(" + name + ")");
        r.transformed = transformed_prefix(r.errors, cache);
        r.classical = classical_verdict(r.errors.values, max_index, eps_min);
        r.statistical = deviation_verdict(r.errors.values, 0.0, config.epsilon_grid, max_index, config.stat);
        r.fib_statistical = deviation_verdict(r.transformed, 0.0, config.epsilon_grid, max_index, config.stat);
        report.records.push_back(std::move(r));
    };
    make_record("1", constant_function(1.0, config.grid_size), true);
    make_record("sin", harmonic(1, true, config.grid_size), true);
    make_record("cos", harmonic(1, false, config.grid_size), true);
    for (const auto& [name, g] : targets) {
        make_record(name, g, false);
    }

    for (std::string_view mode : {"classical", "statistical", "fib-statistical"}) {
        ImplicationCheck check;
        check.mode = std::string(mode);
        check.k1 = report.records[0].verdict(mode);
        check.k2 = report.records[1].verdict(mode);
        check.k3 = report.records[2].verdict(mode);
        std::vector<Convergence> target_verdicts;
        for (std::size_t i = 3; i < report.records.size(); ++i) {
            target_verdicts.push_back(report.records[i].verdict(mode));
        }
        check.k0 = target_verdicts.empty() ? Convergence::Inconclusive : detail::all_converge(target_verdicts);
        const bool tests_converge = detail::all_converge({check.k1, check.k2, check.k3}) == Convergence::Convergent;
        const bool some_target_diverges =
            std::any_of(target_verdicts.begin(), target_verdicts.end(),
                        [](Convergence c) { return c == Convergence::Divergent; });
        check.forward_consistent = !(tests_converge && some_target_diverges);
        const bool some_test_diverges = check.k1 == Convergence::Divergent || check.k2 == Convergence::Divergent ||
                                        check.k3 == Convergence::Divergent;
        check.converse_consistent = !(check.k0 == Convergence::Convergent && some_test_diverges);
        report.implications.push_back(check);
    }
    return report;
}

}  // namespace fibstat
