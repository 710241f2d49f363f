#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace hpl {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e(x) = exp(2*pi*i*x)
inline std::complex<double> e_of(double x) {
    return {std::cos(kTwoPi * x), std::sin(kTwoPi * x)};
}

inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0; // guard against rounding at the top edge
    return f;
}

// distance to the nearest integer
inline double circle_norm(double x) {
    double f = frac(x);
    return f < 0.5 ? f : 1.0 - f;
}

// 64.64 fixed-point carrier for an irrational rotation angle. frac_mul(m)
// returns {m * alpha} with absolute error about m * 2^-64, which keeps
// fractional parts meaningful for multipliers far beyond what a double
// product would allow.
class FixedAngle {
public:
    explicit FixedAngle(double alpha) {
        long double f = alpha - std::floor(static_cast<long double>(alpha));
        bits_ = static_cast<unsigned __int128>(f * 18446744073709551616.0L); // 2^64
    }

    double frac_mul(std::int64_t m) const {
        bool neg = m < 0;
        unsigned __int128 mm = neg ? static_cast<unsigned __int128>(-(m + 1)) + 1
                                   : static_cast<unsigned __int128>(m);
        // low 64 bits of m * bits_ are the fractional part in 0.64 fixed point
        unsigned __int128 prod = mm * bits_; // mod 2^128; fractional bits are the low 64
        std::uint64_t fbits = static_cast<std::uint64_t>(prod);
        double f = static_cast<double>(fbits) / 18446744073709551616.0;
        if (neg && f != 0.0) f = 1.0 - f;
        return f;
    }

    // floor(m * {alpha}) for m >= 0
    std::int64_t floor_mul(std::int64_t m) const {
        unsigned __int128 prod = static_cast<unsigned __int128>(m) * bits_;
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(prod >> 64));
    }

private:
    unsigned __int128 bits_ = 0; // fractional part of alpha in 0.64 fixed point
};

// floor with a representation-boundary guard: values within `guard` of an
// integer are reported via the flag so callers can exclude them from counts.
inline long long guarded_floor(double x, bool& ambiguous, double guard = 1e-12) {
    double f = x - std::floor(x);
    ambiguous = (f < guard && f > 0.0) || (f > 1.0 - guard);
    return static_cast<long long>(std::floor(x));
}

} // namespace hpl
