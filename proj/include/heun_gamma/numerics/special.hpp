#pragma once

// Complex Gamma, Pochhammer, incomplete Gamma and Kummer 1F1.
//
// All branches are principal. On the negative real axis z^a is taken as the
// limit from the upper half-plane, so a value with a negative zero imaginary
// part is treated exactly like one with a positive zero.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>

#include "heun_gamma/errors.hpp"

namespace heun::num {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Switch radius between the power-series and continued-fraction routes of
/// the upper incomplete Gamma function.
inline constexpr double kIncompleteGammaSwitch = 30.0;

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// True when a lies within `tol` of 0, -1, -2, ...
inline bool is_nonpositive_integer(cplx a, double tol = 1e-12) {
    if (std::abs(a.imag()) > tol) return false;
    const double r = std::round(a.real());
    return r <= 0.0 && std::abs(a.real() - r) <= tol;
}

/// Maps -0.0 imaginary parts to +0.0 so that the principal logarithm of a
/// negative real number is log|z| + i*pi.
inline cplx upper_side(cplx z) {
    if (z.imag() == 0.0) return {z.real(), 0.0};
    return z;
}

inline cplx principal_log(cplx z) { return std::log(upper_side(z)); }

/// z^a on the principal branch (upper-side limit on the cut). 0^a = 0 for Re a > 0.
inline cplx principal_pow(cplx z, cplx a) {
    if (z == cplx{0.0, 0.0}) {
        if (a == cplx{0.0, 0.0}) return 1.0;
        if (a.real() > 0.0) return 0.0;
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    if (a.imag() == 0.0 && a.real() == std::round(a.real()) && std::abs(a.real()) <= 64.0) {
        // exact integer powers keep real arguments real
        const int n = static_cast<int>(a.real());
        cplx base = n >= 0 ? z : 1.0 / z;
        cplx result = 1.0;
        for (int k = 0; k < std::abs(n); ++k) result *= base;
        return result;
    }
    return std::exp(a * principal_log(z));
}

namespace detail {

// sin(pi*a) with the real part reduced first, so that sin_pi(-n) == 0 exactly.
inline cplx sin_pi(cplx a) {
    const double n = std::round(a.real());
    const double f = a.real() - n;
    const cplx s = std::sin(cplx{kPi * f, kPi * a.imag()});
    return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

// Lanczos approximation (g = 7, n = 9), valid for Re a >= 0.5.
inline cplx gamma_lanczos(cplx a) {
    static constexpr std::array<double, 9> p = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double g = 7.0;
    const cplx x = a - 1.0;
    cplx sum = p[0];
    for (std::size_t i = 1; i < p.size(); ++i) sum += p[i] / (x + static_cast<double>(i));
    const cplx t = x + g + 0.5;
    return std::sqrt(2.0 * kPi) * std::exp((x + 0.5) * std::log(t) - t) * sum;
}

} // namespace detail

/// Complete Gamma function.
inline cplx gamma(cplx a) {
    if (is_nonpositive_integer(a)) throw PoleError("Gamma(a) has a pole at a non-positive integer");
    if (a.imag() == 0.0 && a.real() == std::round(a.real()) && a.real() <= 30.0) {
        double f = 1.0;
        for (int k = 2; k < static_cast<int>(a.real()); ++k) f *= k;
        return f;
    }
    if (a.real() < 0.5) return kPi / (detail::sin_pi(a) * detail::gamma_lanczos(1.0 - a));
    return detail::gamma_lanczos(a);
}

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), (a)_0 = 1.
inline cplx pochhammer(cplx a, std::size_t k) {
    cplx r = 1.0;
    for (std::size_t i = 0; i < k; ++i) r *= a + static_cast<double>(i);
    return r;
}

namespace detail {

inline constexpr std::size_t kSeriesCap = 10000;
inline constexpr double kSeriesTol = 1e-17;

// Plain Taylor series of 1F1; callers choose the half-plane.
inline cplx kummer_taylor(cplx a, cplx b, cplx z) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (std::size_t k = 0; k < kSeriesCap; ++k) {
        const double kd = static_cast<double>(k);
        const cplx ratio = (a + kd) * z / ((b + kd) * (kd + 1.0));
        term *= ratio;
        sum += term;
        if (term == cplx{0.0, 0.0}) return sum;
        if (std::abs(term) <= 1e-16 * std::abs(sum) && std::abs(ratio) < 1.0) return sum;
    }
    throw ConvergenceError("1F1 Taylor series did not converge within 10000 terms");
}

} // namespace detail

/// Kummer confluent hypergeometric function 1F1(a; b; z).
///
/// Summed by Taylor series; for Re z < 0 the Kummer transformation
/// 1F1(a;b;z) = e^z 1F1(b-a;b;-z) is applied first so that the summed terms do
/// not alternate on the real axis.
inline cplx kummer_1f1(cplx a, cplx b, cplx z) {
    if (is_nonpositive_integer(b)) throw PoleError("1F1(a;b;z) requires b not a non-positive integer");
    if (z == cplx{0.0, 0.0}) return 1.0;
    if (z.real() < 0.0 && !is_nonpositive_integer(a, 0.0)) {
        return std::exp(z) * detail::kummer_taylor(b - a, b, -z);
    }
    return detail::kummer_taylor(a, b, z);
}

namespace detail {

// z^{-a} lower_gamma(a, z) by power series. `cond` receives sum|terms| / |sum|,
// an estimate of the relative rounding amplification.
inline cplx lower_gamma_kernel_cond(cplx a, cplx z, double& cond) {
    cond = 1.0;
    if (z == cplx{0.0, 0.0}) return 1.0 / a;
    if (z.real() > 0.0 || std::abs(z) < std::abs(a + 1.0)) {
        // e^{-z}/a * sum_k z^k / (a+1)_k : positive terms on the positive axis,
        // and quickly decaying terms whenever |z| < |a|
        cplx term = 1.0;
        cplx sum = 1.0;
        double abs_sum = 1.0;
        for (std::size_t k = 1; k < kSeriesCap; ++k) {
            const cplx ratio = z / (a + static_cast<double>(k));
            term *= ratio;
            sum += term;
            abs_sum += std::abs(term);
            if (std::abs(term) <= kSeriesTol * std::abs(sum) && std::abs(ratio) < 1.0) {
                cond = abs_sum / std::abs(sum);
                return std::exp(-z) * sum / a;
            }
        }
        throw ConvergenceError("lower Gamma kernel series did not converge");
    }
    cplx power = 1.0; // (-z)^k / k!
    cplx sum = 1.0 / a;
    double abs_sum = std::abs(sum);
    for (std::size_t k = 1; k < kSeriesCap; ++k) {
        const double kd = static_cast<double>(k);
        power *= -z / kd;
        const cplx term = power / (a + kd);
        sum += term;
        abs_sum += std::abs(term);
        if (std::abs(term) <= kSeriesTol * std::abs(sum) && kd > std::abs(z)) {
            cond = abs_sum / std::abs(sum);
            return sum;
        }
    }
    throw ConvergenceError("lower Gamma kernel series did not converge");
}

} // namespace detail

namespace detail {

// Gamma(0; z) = E1(z) by its convergent series.
inline cplx e1_series(cplx z) {
    cplx power = 1.0;
    cplx sum = 0.0;
    for (std::size_t k = 1; k < kSeriesCap; ++k) {
        const double kd = static_cast<double>(k);
        power *= -z / kd;
        const cplx term = power / kd;
        sum += term;
        if (std::abs(term) <= kSeriesTol * std::abs(sum) && kd > std::abs(z)) {
            return -kEulerGamma - principal_log(z) - sum;
        }
    }
    throw ConvergenceError("E1 series did not converge");
}

} // namespace detail

namespace detail {

// Series route with a condition estimate covering both the kernel sum and the
// subtraction from Gamma(a).
inline cplx upper_gamma_series_cond(cplx a, cplx z, double& cond) {
    cond = 1.0;
    z = upper_side(z);
    if (is_nonpositive_integer(a)) {
        const int m = -static_cast<int>(std::round(a.real()));
        cplx value = detail::e1_series(z);
        const cplx ez = std::exp(-z);
        for (int k = 1; k <= m; ++k) {
            const double ak = -static_cast<double>(k);
            value = (value - principal_pow(z, ak) * ez) / ak;
        }
        return value;
    }
    if (is_nonpositive_integer(a, 0.0)) throw PoleError("lower Gamma kernel undefined at non-positive integer a");
    double kernel_cond = 1.0;
    const cplx lower = principal_pow(z, a) * lower_gamma_kernel_cond(a, z, kernel_cond);
    const cplx full = gamma(a);
    const cplx value = full - lower;
    cond = (std::abs(full) + kernel_cond * std::abs(lower)) / std::abs(value);
    return value;
}

} // namespace detail

/// Series route: Gamma(a) - z^a/a 1F1(a; a+1; -z); non-positive integer a by
/// E1 and the downward recurrence Gamma(a;z) = (Gamma(a+1;z) - z^a e^{-z}) / a.
inline cplx upper_incomplete_gamma_series(cplx a, cplx z) {
    double cond = 1.0;
    return detail::upper_gamma_series_cond(a, z, cond);
}

/// Continued-fraction route (Legendre fraction, modified Lentz).
inline cplx upper_incomplete_gamma_cf(cplx a, cplx z, std::size_t max_iter = 5000) {
    z = upper_side(z);
    if (z == cplx{0.0, 0.0}) throw ConvergenceError("continued fraction undefined at z = 0");
    constexpr double tiny = 1e-300;
    cplx b = z + 1.0 - a;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (std::size_t i = 1; i <= max_iter; ++i) {
        const double id = static_cast<double>(i);
        const cplx an = -id * (id - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return std::exp(a * principal_log(z) - z) * h;
    }
    throw ConvergenceError("incomplete Gamma continued fraction did not converge");
}

/// Entire kernel z^{-a} * lower_gamma(a, z) = sum_k (-z)^k / (k! (a+k)).
///
/// Branch free: the lower incomplete Gamma function on any sheet is
/// w^a * lower_gamma_kernel(a, w) for the chosen value of w^a. When the power
/// series cancels badly (large |z| off the positive axis) the complement
/// z^{-a} (Gamma(a) - Gamma(a; z)) with the continued fraction is used if it
/// is better conditioned.
inline cplx lower_gamma_kernel(cplx a, cplx z) {
    if (is_nonpositive_integer(a, 0.0)) throw PoleError("lower Gamma kernel undefined at non-positive integer a");
    double cond = 1.0;
    cplx series{std::numeric_limits<double>::quiet_NaN(), 0.0};
    try {
        series = detail::lower_gamma_kernel_cond(a, z, cond);
    } catch (const ConvergenceError&) {
        cond = std::numeric_limits<double>::infinity();
    }
    if (cond <= 1e3 && is_finite(series)) return series;
    try {
        const cplx full = gamma(a), upper = upper_incomplete_gamma_cf(a, z);
        const cplx diff = full - upper;
        const double cond_complement = (std::abs(full) + std::abs(upper)) / std::abs(diff);
        if (is_finite(diff) && cond_complement < cond) return diff / principal_pow(z, a);
    } catch (const ConvergenceError&) {
    }
    if (!is_finite(series)) throw ConvergenceError("lower Gamma kernel: no route converged");
    return series;
}

/// Lower incomplete Gamma function on the principal branch.
inline cplx lower_incomplete_gamma(cplx a, cplx z) {
    return principal_pow(z, a) * lower_gamma_kernel(a, z);
}

/// Upper incomplete Gamma function Gamma(a; z) = int_z^inf e^{-t} t^{a-1} dt.
///
/// The power series is tried first for |z| <= 30 and kept when its measured
/// cancellation stays small; otherwise the continued fraction is used, with
/// the series as fallback when the fraction fails to converge.
inline cplx upper_incomplete_gamma(cplx a, cplx z) {
    z = upper_side(z);
    if (z == cplx{0.0, 0.0}) {
        if (a.real() > 0.0) return gamma(a);
        throw PoleError("Gamma(a; 0) diverges for Re a <= 0");
    }
    constexpr double kMaxCondition = 1e3;
    cplx series{std::numeric_limits<double>::quiet_NaN(), 0.0};
    double cond = std::numeric_limits<double>::infinity();
    const double r = std::abs(z);
    auto try_series = [&] {
        try {
            series = detail::upper_gamma_series_cond(a, z, cond);
            if (!is_finite(series)) cond = std::numeric_limits<double>::infinity();
        } catch (const ConvergenceError&) {
        }
    };
    if (r <= kIncompleteGammaSwitch || r < std::abs(a) || z.real() < 0.0) {
        try_series();
        if (cond <= kMaxCondition) return series;
    }
    try {
        const cplx value = upper_incomplete_gamma_cf(a, z);
        if (is_finite(value)) return value;
    } catch (const ConvergenceError&) {
    }
    if (a.real() < 0.0) {
        // downward recurrence Gamma(a;z) = (Gamma(a+1;z) - z^a e^{-z}) / a from Re a >= 0
        const int m = static_cast<int>(std::ceil(-a.real()));
        cplx value = upper_incomplete_gamma(a + static_cast<double>(m), z);
        const cplx lz = principal_log(z);
        for (int k = m - 1; k >= 0; --k) {
            const cplx ak = a + static_cast<double>(k);
            value = (value - std::exp(ak * lz - z)) / ak;
        }
        if (is_finite(value)) return value;
    }
    if (!std::isfinite(cond)) try_series();
    if (!is_finite(series)) throw ConvergenceError("incomplete Gamma: neither route converged");
    return series;
}

} // namespace heun::num
