#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include <boost/multiprecision/cpp_int.hpp>

#include "fibstat/error.hpp"

namespace fibstat {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Rounds num/den (den > 0) to the nearest binary64, ties to even.
/// Returns nullopt when the magnitude exceeds the largest finite double.
inline std::optional<double> quotient_to_double(const Integer& signed_num, const Integer& den) {
    using boost::multiprecision::msb;
    if (den <= 0) {
        throw DomainError("quotient_to_double: denominator must be positive");
    }
    if (signed_num == 0) {
        return 0.0;
    }
    const bool negative = signed_num < 0;
    const Integer num = negative ? Integer(-signed_num) : signed_num;

    // Scale so the integer quotient lands in [2^61, 2^63): enough guard bits
    // for a single correct rounding with a sticky bit in the last place.
    const long shift = 62 - (static_cast<long>(msb(num)) - static_cast<long>(msb(den)));
    if (shift < -1100) {
        return std::nullopt;
    }
    if (shift > 1200) {
        return negative ? -0.0 : 0.0;
    }
    Integer quotient;
    Integer remainder;
    if (shift >= 0) {
        boost::multiprecision::divide_qr(Integer(num << shift), den, quotient, remainder);
    } else {
        boost::multiprecision::divide_qr(num, Integer(den << -shift), quotient, remainder);
    }
    auto bits = quotient.convert_to<std::uint64_t>();
    if (remainder != 0) {
        bits |= 1u;
    }
    const double magnitude = std::ldexp(static_cast<double>(bits), static_cast<int>(-shift));
    if (!std::isfinite(magnitude)) {
        return std::nullopt;
    }
    return negative ? -magnitude : magnitude;
}

inline std::optional<double> to_double(const Rational& value) {
    return quotient_to_double(boost::multiprecision::numerator(value),
                              boost::multiprecision::denominator(value));
}

inline std::optional<double> to_double(const Integer& value) { return quotient_to_double(value, Integer(1)); }

/// The exact dyadic rational a finite double denotes.
inline Rational exact_from_double(double value) {
    if (!std::isfinite(value)) {
        throw DomainError("cannot represent a non-finite value exactly");
    }
    if (value == 0.0) {
        return Rational(0);
    }
    int exponent = 0;
    const double fraction = std::frexp(value, &exponent);
    const auto mantissa = static_cast<std::int64_t>(std::ldexp(fraction, 53));
    const int scale = exponent - 53;
    if (scale >= 0) {
        return Rational(Integer(mantissa) << scale);
    }
    return Rational(Integer(mantissa), Integer(1) << -scale);
}

}  // namespace fibstat
