#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of complex functions along a
// straight segment of the complex plane.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "heun_gamma/errors.hpp"
#include "heun_gamma/numerics/special.hpp"

namespace heun::num {

namespace detail {

struct KronrodRule {
    static constexpr std::array<double, 8> x = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

// Integral of f(a + t (b - a)) (b - a) dt over [t0, t1]; err receives |K - G|.
inline cplx kronrod_panel(const std::function<cplx(cplx)>& f, cplx a, cplx b, double t0, double t1,
                          double& err) {
    const double half = 0.5 * (t1 - t0);
    const double mid = 0.5 * (t1 + t0);
    const cplx dz = b - a;
    cplx k = KronrodRule::wk[7] * f(a + mid * dz);
    cplx g = KronrodRule::wg[3] * f(a + mid * dz);
    for (std::size_t i = 0; i < 7; ++i) {
        const double dt = half * KronrodRule::x[i];
        const cplx fs = f(a + (mid - dt) * dz) + f(a + (mid + dt) * dz);
        k += KronrodRule::wk[i] * fs;
        if (i % 2 == 1) g += KronrodRule::wg[i / 2] * fs;
    }
    k *= half * dz;
    g *= half * dz;
    err = std::abs(k - g);
    return k;
}

inline cplx adaptive_panel(const std::function<cplx(cplx)>& f, cplx a, cplx b, double t0, double t1,
                           double tol, int depth) {
    double err = 0.0;
    const cplx whole = kronrod_panel(f, a, b, t0, t1, err);
    if (!is_finite(whole)) throw ConvergenceError("quadrature integrand is not finite on the path");
    if (err <= tol || depth >= 40) return whole;
    const double tm = 0.5 * (t0 + t1);
    return adaptive_panel(f, a, b, t0, tm, 0.5 * tol, depth + 1) +
           adaptive_panel(f, a, b, tm, t1, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Integral of f along the segment from a to b, absolute tolerance
/// max(abs_tol, rel_tol * |rough estimate|).
inline cplx integrate_segment(const std::function<cplx(cplx)>& f, cplx a, cplx b, double rel_tol = 1e-12,
                              double abs_tol = 1e-300) {
    if (a == b) return 0.0;
    double err = 0.0;
    const cplx rough = detail::kronrod_panel(f, a, b, 0.0, 1.0, err);
    const double tol = std::max(abs_tol, rel_tol * std::abs(rough));
    return detail::adaptive_panel(f, a, b, 0.0, 1.0, tol, 0);
}

} // namespace heun::num
