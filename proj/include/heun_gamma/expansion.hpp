#pragma once

// Incomplete-Gamma series for u obtained by integrating the Frobenius series
// of v = e^Lambda u' term by term.
//
// With xi = z - z1, w = s xi^p / p and a_n = (1 + n + mu) / p, each term is
// taken in the anchored form
//     (pref/p) c_n xi^{1+n+mu} K(a_n, w),   K(a, w) = w^{-a} lower_gamma(a, w),
// which equals -(pref/p) c_n (p/s)^{a_n} [Gamma(a_n; w) - Gamma(a_n)] on the
// branch of xi^mu used for v. The constants Gamma(a_n) are absorbed into C0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "heun_gamma/equations.hpp"
#include "heun_gamma/errors.hpp"
#include "heun_gamma/numerics/special.hpp"
#include "heun_gamma/recurrence.hpp"

namespace heun {

struct GammaSeries {
    RecurrenceScheme scheme;
    RecurrenceRelation relation;
    CoefficientSequence coeffs;
    cplx z1;
    cplx mu;
    cplx s;
    int p = 1;
    cplx prefactor = 1.0;
    cplx c0 = 0.0;
    bool c0_determined = false;
    double radius = std::numeric_limits<double>::infinity();
    bool formal = false; ///< center is an irregular point of the v-equation: asymptotic series

    std::size_t order() const { return coeffs.c.empty() ? 0 : coeffs.c.size() - 1; }
    cplx gamma_parameter(std::size_t n) const { return (1.0 + static_cast<double>(n) + mu) / static_cast<double>(p); }
};

struct SeriesValue {
    cplx u, du, d2u;
    bool in_region = true;
};

/// Operator of the weighted derivative for a scheme.
inline RationalOperator v_operator(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    const RecurrenceRelation rel = build_recurrence(eq, sc);
    return derive_v_equation(eq.u_operator(), WeightSpec::power(rel.z1, rel.s, rel.p));
}

struct ConvergenceInfo {
    double radius = std::numeric_limits<double>::infinity();
    bool formal = false;
};

/// Distance from the center to the nearest other finite singular point of the
/// v-operator; `formal` marks an irregular center, where the series is only
/// asymptotic even though the distance is reported as for a regular one.
inline ConvergenceInfo convergence_info(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    const RecurrenceRelation rel = build_recurrence(eq, sc);
    const RationalOperator op = derive_v_equation(eq.u_operator(), WeightSpec::power(rel.z1, rel.s, rel.p));
    ConvergenceInfo info;
    for (cplx r : singular_points(op)) {
        const double d = std::abs(r - rel.z1);
        if (d <= 1e-8 * std::max(1.0, std::abs(rel.z1))) continue;
        info.radius = std::min(info.radius, d);
    }
    try {
        indicial_exponents(op, rel.z1);
    } catch (const IrregularError&) {
        info.formal = true;
    } catch (const NotSingularError&) {
    }
    return info;
}

inline double convergence_radius(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    return convergence_info(eq, sc).radius;
}

/// Builds the series; mu defaults to the first admissible exponent that
/// generates without an interior degeneracy.
inline GammaSeries assemble(const ConfluentHeun& eq, const RecurrenceScheme& sc, std::optional<cplx> mu,
                            std::size_t N) {
    GammaSeries g;
    g.scheme = sc;
    g.relation = build_recurrence(eq, sc);
    if (g.relation.s == cplx{0.0, 0.0}) throw PreconditionError("weight scale s must be nonzero");
    g.coeffs = mu ? generate_coefficients(g.relation, *mu, N) : generate_first_admissible(g.relation, N);
    g.mu = g.coeffs.mu;
    g.z1 = g.relation.z1;
    g.s = g.relation.s;
    g.p = g.relation.p;
    g.prefactor = g.relation.prefactor;
    const ConvergenceInfo info = convergence_info(eq, sc);
    g.radius = info.radius;
    g.formal = info.formal;
    return g;
}

namespace detail {

inline cplx stable_sum(std::vector<cplx>& terms) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const cplx& t : terms) {
        const double a = std::abs(t);
        if (a == 0.0) continue;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (hi > 1e8 * lo) {
        std::sort(terms.begin(), terms.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
    }
    cplx s = 0.0;
    for (const cplx& t : terms) s += t;
    return s;
}

inline double scale_factor(const GammaSeries& g) { return std::pow(10.0, g.coeffs.scale_log10); }

} // namespace detail

/// Truncated v = sum c_n xi^{n+mu} and its derivative.
inline std::pair<cplx, cplx> v_series(const GammaSeries& g, cplx z) {
    const cplx xi = z - g.z1;
    std::vector<cplx> v_terms, dv_terms;
    if (xi == cplx{0.0, 0.0}) {
        // only finite for mu a non-negative integer
        if (!num::is_nonpositive_integer(-g.mu))
            throw EvaluationError("v is singular at the expansion center for this exponent");
        const auto m = static_cast<std::size_t>(std::llround(g.mu.real()));
        cplx v = m == 0 ? g.coeffs.c[0] : cplx{0.0, 0.0};
        cplx dv = 0.0;
        if (m == 1) dv = g.coeffs.c[0];
        if (m == 0 && g.coeffs.c.size() > 1) dv = g.coeffs.c[1];
        return {v * detail::scale_factor(g), dv * detail::scale_factor(g)};
    }
    const cplx xmu = num::principal_pow(xi, g.mu);
    cplx power = xmu; // xi^{n+mu}
    for (std::size_t n = 0; n < g.coeffs.c.size(); ++n) {
        const cplx nu = static_cast<double>(n) + g.mu;
        v_terms.push_back(g.coeffs.c[n] * power);
        dv_terms.push_back(g.coeffs.c[n] * nu * power / xi);
        power *= xi;
    }
    const double f = detail::scale_factor(g);
    return {detail::stable_sum(v_terms) * f, detail::stable_sum(dv_terms) * f};
}

/// Anchored term n (without C0) at z.
inline cplx anchored_term(const GammaSeries& g, std::size_t n, cplx z) {
    const cplx cn = g.coeffs.c[n];
    if (cn == cplx{0.0, 0.0}) return 0.0;
    const cplx xi = z - g.z1;
    const double pd = static_cast<double>(g.p);
    const cplx a = g.gamma_parameter(n);
    const cplx w = g.s * num::principal_pow(xi, pd) / pd;
    if (num::is_nonpositive_integer(a, 1e-12)) {
        if (xi == cplx{0.0, 0.0}) throw EvaluationError("Gamma term with non-positive integer parameter at the center");
        // -(p/s)^a Gamma(-m; w) with log w continued along the branch of xi
        const int m = -static_cast<int>(std::llround(a.real()));
        double fact = 1.0;
        for (int k = 2; k <= m; ++k) fact *= k;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const cplx log_branch = num::principal_log(g.s / pd) + pd * num::principal_log(xi);
        const cplx ig = num::upper_incomplete_gamma(static_cast<double>(-m), w) +
                        sign / fact * (num::principal_log(w) - log_branch);
        const cplx factor = num::principal_pow(g.s / pd, static_cast<double>(m));
        return -g.prefactor / pd * cn * factor * ig;
    }
    if (xi == cplx{0.0, 0.0}) return 0.0;
    const cplx power = num::principal_pow(xi, g.mu) * num::principal_pow(xi, 1.0 + static_cast<double>(n));
    return g.prefactor / pd * cn * power * num::lower_gamma_kernel(a, w);
}

/// The literal term -(pref/p) c_n (p/s)^{a_n} Gamma(a_n; w); differs from
/// anchored_term by a constant on any region where the branches agree.
inline cplx literal_term(const GammaSeries& g, std::size_t n, cplx z) {
    const double pd = static_cast<double>(g.p);
    const cplx a = g.gamma_parameter(n);
    const cplx w = g.s * num::principal_pow(z - g.z1, pd) / pd;
    return -g.prefactor / pd * g.coeffs.c[n] * num::principal_pow(pd / g.s, a) * num::upper_incomplete_gamma(a, w) *
           detail::scale_factor(g);
}

/// Sum of the anchored terms at z (u - C0).
inline cplx anchored_sum(const GammaSeries& g, cplx z) {
    std::vector<cplx> terms;
    terms.reserve(g.coeffs.c.size());
    try {
        for (std::size_t n = 0; n < g.coeffs.c.size(); ++n) terms.push_back(anchored_term(g, n, z));
    } catch (const EvaluationError&) {
        throw;
    } catch (const Error& e) {
        throw EvaluationError(std::string("Gamma term evaluation failed: ") + e.what());
    }
    return detail::stable_sum(terms) * detail::scale_factor(g);
}

/// u, u' and u'' (the derivatives in closed form from the v-series).
inline SeriesValue evaluate(const GammaSeries& g, cplx z) {
    SeriesValue out;
    const cplx xi = z - g.z1;
    out.in_region = std::abs(xi) < g.radius && !g.formal;
    const double pd = static_cast<double>(g.p);
    const auto [v, dv] = v_series(g, z);
    const cplx w = g.s * num::principal_pow(xi, pd) / pd;
    const cplx dlambda = g.s * num::principal_pow(xi, pd - 1.0);
    const cplx e = g.prefactor * std::exp(-w);
    out.du = e * v;
    out.d2u = e * (dv - dlambda * v);
    out.u = g.c0 + anchored_sum(g, z);
    if (!num::is_finite(out.u) || !num::is_finite(out.du)) throw EvaluationError("series evaluation overflowed");
    return out;
}

/// |P u'' + Q u' + (alpha z - q) u| relative to the sum of the term magnitudes.
inline double normalized_residual(const ConfluentHeun& eq, cplx z, const SeriesValue& v) {
    const cplx a = eq.P()(z) * v.d2u, b = eq.Q()(z) * v.du, c = (eq.alpha * z - eq.q) * v.u;
    const double scale = std::abs(a) + std::abs(b) + std::abs(c);
    if (scale == 0.0) return 0.0;
    return std::abs(a + b + c) / scale;
}

/// A reference point strictly inside the disk of convergence, off the real axis.
inline cplx default_reference_point(const GammaSeries& g) {
    const double rho = std::isfinite(g.radius) ? std::min(0.3 * g.radius, 0.5) : 0.5;
    return g.z1 + std::polar(rho, 0.7);
}

/// Fixes C0 so that u solves the equation: u(z_ref) from the equation itself,
/// u = -(P u'' + Q u')/(alpha z - q), with u', u'' taken from v.
inline cplx determine_c0(GammaSeries& g, const ConfluentHeun& eq, cplx z_ref) {
    const cplx denom = eq.alpha * z_ref - eq.q;
    if (std::abs(denom) <= 1e-12 * (std::abs(eq.alpha) * std::abs(z_ref) + std::abs(eq.q)) ||
        denom == cplx{0.0, 0.0})
        throw SingularRefError("alpha z_ref = q: the reference point is the extra singularity");
    const double d = std::abs(z_ref - g.z1);
    if (!(d < g.radius)) throw RegionError("reference point lies outside the disk of convergence");
    if (d == 0.0 && !num::is_nonpositive_integer(-g.mu))
        throw RegionError("reference point coincides with the expansion center");
    const cplx saved = g.c0;
    g.c0 = 0.0;
    const SeriesValue s = evaluate(g, z_ref);
    g.c0 = saved;
    const cplx u_ref = -(eq.P()(z_ref) * s.d2u + eq.Q()(z_ref) * s.du) / denom;
    g.c0 = u_ref - s.u;
    g.c0_determined = true;
    return g.c0;
}

inline cplx determine_c0(GammaSeries& g, const ConfluentHeun& eq) {
    return determine_c0(g, eq, default_reference_point(g));
}

/// Right side of the incomplete-Gamma expansion of 1F1(a; b; z):
/// 1 + (a/b) sum_n (b-a)_n / ((b+1)_n n!) (Gamma(1+n; -z) - Gamma(1+n; 0)).
inline cplx kummer_via_gamma(cplx a, cplx b, cplx z, std::size_t max_terms = 400) {
    cplx sum = 0.0;
    cplx ratio = 1.0; // (b-a)_n / ((b+1)_n n!)
    double nfact = 1.0;
    for (std::size_t n = 0; n < max_terms; ++n) {
        const double nd = static_cast<double>(n);
        if (n > 0) {
            ratio *= (b - a + nd - 1.0) / ((b + nd) * nd);
            nfact *= nd;
        }
        const cplx t = ratio * (num::upper_incomplete_gamma(1.0 + nd, -z) - nfact);
        sum += t;
        // |Gamma(1+n; -z) - n!| <= e^{|z|} |z|^{n+1} / (n+1)
        const double bound = std::abs(ratio) * std::exp(std::abs(z)) * std::pow(std::abs(z), nd + 1.0) / (nd + 1.0);
        if (n > 2 && bound <= 1e-17 * std::abs(sum)) break;
        if (!std::isfinite(nfact)) break;
    }
    return 1.0 + a / b * sum;
}

} // namespace heun
