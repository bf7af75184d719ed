#pragma once

// Reference values computed without the library: native 128-bit integers,
// closed forms, and constants frozen from an independent big-rational run.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using u128 = unsigned __int128;

/// f_0..f_n with f_1 = f_2 = 1 in native 128-bit arithmetic (n <= 186).
inline std::vector<u128> fibonacci(std::size_t n) {
    std::vector<u128> f(n + 1, 0);
    if (n >= 1) f[1] = 1;
    for (std::size_t k = 2; k <= n; ++k) {
        f[k] = f[k - 1] + f[k - 2];
    }
    return f;
}

inline constexpr std::uint64_t kF90 = 2880067194370816120ULL;
/// sum_{k=61}^{90} 1/f_k, exact rational rounded once.
inline constexpr double kReciprocalTail61To90 = 1.0452351208507093e-12;
inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

inline std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline std::uint64_t icbrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::cbrt(static_cast<double>(n)));
    while (r * r * r > n) --r;
    while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Analytic modulus of continuity of sin for delta <= pi.
inline double sine_modulus(double delta) { return 2.0 * std::sin(delta / 2.0); }

/// ||F_k(sin) - sin|| = 1/(k+1).
inline double fejer_sine_error(std::size_t k) { return 1.0 / static_cast<double>(k + 1); }

/// sup_x of the Fejer second moment.
inline double fejer_moment(std::size_t k) { return 1.0 / (2.0 * static_cast<double>(k + 1)); }

}  // namespace oracle
