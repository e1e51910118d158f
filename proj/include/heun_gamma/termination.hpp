#pragma once

// Right-hand termination: parameter values for which c_{N+1} = c_{N+2} = 0 and
// the trailing coefficient vanishes at N, leaving a finite-sum solution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "heun_gamma/equations.hpp"
#include "heun_gamma/errors.hpp"
#include "heun_gamma/expansion.hpp"
#include "heun_gamma/numerics/polynomial.hpp"
#include "heun_gamma/recurrence.hpp"

namespace heun {

/// The alpha that annihilates the trailing coefficient function at index N.
inline cplx rhs_alpha(const ConfluentHeun& eq, const RecurrenceScheme& sc, std::size_t N, cplx mu) {
    if (sc.type != ExpansionType::I && !(sc.variant == Variant::BCHE && sc.center == Center::Extra))
        throw UnsupportedSchemeError("trailing coefficient is independent of n: the series cannot terminate");
    if (eq.epsilon == cplx{0.0, 0.0}) throw PreconditionError("termination requires ε ≠ 0");
    const double Nd = static_cast<double>(N);
    switch (sc.variant) {
    case Variant::SCHE: return eq.epsilon * (Nd + eq.gamma + eq.delta + mu);
    case Variant::DCHE: return eq.epsilon * (Nd + mu + eq.delta);
    case Variant::BCHE:
        if (sc.type == ExpansionType::IIq && eq.alpha != cplx{0.0, 0.0} &&
            std::abs(eq.delta + eq.epsilon * eq.q / eq.alpha) <= 1e-12 * (std::abs(eq.delta) + 1.0))
            return eq.epsilon * (Nd + mu + eq.gamma);
        throw UnsupportedSchemeError("BCHE terminates only for type II about z0 with δ + εz0 = 0");
    case Variant::TCHE: break;
    }
    throw UnsupportedSchemeError("trailing coefficient is independent of n: the series cannot terminate");
}

struct ClearedCoefficient {
    Polynomial d;     ///< c_n times the clearing factor
    Polynomial clear; ///< product of the leading coefficients L_1 ... L_n
};

namespace detail {

// Coefficient functions as polynomials in q, by interpolation at eight points
// on the unit circle (every entry has degree < 8 in q).
inline std::vector<std::vector<Polynomial>> terms_in_q(const ConfluentHeun& eq, const RecurrenceScheme& sc,
                                                       cplx mu, std::size_t n_max) {
    constexpr std::size_t M = 8;
    const cplx lam = sc.has_free_lambda() ? sc.lambda.value_or(1.0) : eq.epsilon;
    // values[k][j][m] = f_j(m) at q = omega^k
    std::vector<std::vector<std::vector<cplx>>> values(M);
    std::size_t k_terms = 0;
    for (std::size_t k = 0; k < M; ++k) {
        ConfluentHeun e = eq;
        e.q = std::polar(1.0, 2.0 * num::kPi * static_cast<double>(k) / M);
        const cplx Z = sc.center == Center::Extra ? e.q / e.alpha : cplx{0.0, 0.0};
        std::vector<Polynomial> terms;
        std::vector<std::string> names;
        raw_terms(e, sc, lam, Z, terms, names);
        k_terms = terms.size();
        values[k].resize(terms.size());
        for (std::size_t j = 0; j < terms.size(); ++j)
            for (std::size_t m = 0; m <= n_max; ++m) values[k][j].push_back(terms[j](static_cast<double>(m) + mu));
    }
    std::vector<std::vector<Polynomial>> out(k_terms, std::vector<Polynomial>(n_max + 1));
    for (std::size_t j = 0; j < k_terms; ++j) {
        for (std::size_t m = 0; m <= n_max; ++m) {
            std::vector<cplx> coeffs(M, 0.0);
            double mag = 0.0;
            for (std::size_t c = 0; c < M; ++c) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < M; ++k)
                    acc += values[k][j][m] * std::polar(1.0, -2.0 * num::kPi * static_cast<double>(k * c) / M);
                coeffs[c] = acc / static_cast<double>(M);
                mag = std::max(mag, std::abs(coeffs[c]));
            }
            for (cplx& x : coeffs)
                if (std::abs(x) <= 1e-14 * mag) x = 0.0;
            out[j][m] = Polynomial(coeffs);
        }
    }
    return out;
}

} // namespace detail

/// d_n(q) and the clearing factor for n = 0 .. N+2, with
/// d_n = -sum_j f_j(n-j) d_{n-j} prod_{k=n-j+1}^{n-1} L_k.
inline std::vector<ClearedCoefficient> coefficients_as_q_polynomials(const ConfluentHeun& eq,
                                                                     const RecurrenceScheme& sc, cplx mu,
                                                                     std::size_t N) {
    const std::size_t n_max = N + 2;
    const auto f = detail::terms_in_q(eq, sc, mu, n_max);
    std::vector<Polynomial> L(n_max + 1);
    for (std::size_t k = 1; k <= n_max; ++k) {
        L[k] = f[0][k];
        if (L[k].is_zero()) throw DegenerateIndexError(k);
    }
    std::vector<ClearedCoefficient> out(n_max + 1);
    out[0] = {Polynomial{1.0}, Polynomial{1.0}};
    for (std::size_t n = 1; n <= n_max; ++n) {
        Polynomial d;
        for (std::size_t j = 1; j < f.size() && j <= n; ++j) {
            Polynomial t = f[j][n - j] * out[n - j].d;
            for (std::size_t k = n - j + 1; k <= n - 1; ++k) t = t * L[k];
            d -= t;
        }
        out[n] = {d, out[n - 1].clear * L[n]};
    }
    return out;
}

/// Sup over a 10 x 20 polar grid (half-radius disk, or radius 2 when
/// unbounded) of the normalized ODE residual.
inline double verify_finite_sum(const ConfluentHeun& eq, const GammaSeries& series) {
    const double rmax = std::isfinite(series.radius) ? 0.5 * series.radius : 2.0;
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double th = -num::kPi + (j + 0.5) * 2.0 * num::kPi / 20.0;
            const cplx z = series.z1 + std::polar(rmax * i / 10.0, th);
            worst = std::max(worst, normalized_residual(eq, z, evaluate(series, z)));
        }
    }
    return worst;
}

struct RootCertificate {
    cplx q;
    double next1 = 0.0; ///< |c_{N+1}| / scale
    double next2 = 0.0; ///< |c_{N+2}| / scale
    double residual = std::numeric_limits<double>::infinity();
    bool certified = false;
    std::string note;
};

struct TerminationCandidate {
    std::size_t N = 0;
    cplx mu;
    cplx alpha;
    std::vector<RootCertificate> certified;
    std::vector<RootCertificate> uncertified;
};

/// Roots of c_{N+1}(q) = 0, each certified by the following coefficients and
/// by the ODE residual of the finite sum.
inline TerminationCandidate find_terminating_q(const ConfluentHeun& eq, const RecurrenceScheme& sc,
                                               std::size_t N, cplx mu, double tol = 1e-8) {
    if (sc.variant == Variant::BCHE && sc.type == ExpansionType::IIq && sc.center == Center::Extra)
        throw UnsupportedSchemeError("q is fixed by δ + εz0 = 0 for this scheme; there is no q to search");
    rhs_alpha(eq, sc, N, mu); // scheme support check
    const auto cleared = coefficients_as_q_polynomials(eq, sc, mu, N);
    const Polynomial target = cleared[N + 1].d.chopped(1e-13);
    if (target.degree() < 1) {
        if (target.is_zero()) throw NoRootsError("c_{N+1} vanishes identically in q");
        throw NoRootsError("c_{N+1}(q) has no roots");
    }
    TerminationCandidate cand;
    cand.N = N;
    cand.mu = mu;
    cand.alpha = eq.alpha;

    for (const auto& [root, mult] : num::cluster_points(num::polynomial_roots(target), 1e-7)) {
        RootCertificate rc;
        rc.q = root;
        // spurious: a leading coefficient vanishes there
        bool spurious = false;
        for (std::size_t k = 1; k <= N + 1; ++k) {
            const Polynomial Lk = cleared[k].clear;
            if (std::abs(Lk(root)) <= 1e-10 * Lk.magnitude_at(root)) spurious = true;
        }
        if (spurious) {
            rc.note = "clearing factor vanishes";
            cand.uncertified.push_back(rc);
            continue;
        }
        try {
            ConfluentHeun e = eq;
            e.q = root;
            const RecurrenceRelation rel = build_recurrence(e, sc);
            const CoefficientSequence full = generate_coefficients(rel, mu, N + 2);
            double scale = 0.0;
            for (std::size_t n = 0; n <= N; ++n) scale = std::max(scale, std::abs(full.c[n]));
            rc.next1 = std::abs(full.c[N + 1]) / scale;
            rc.next2 = std::abs(full.c[N + 2]) / scale;
            GammaSeries series = assemble(e, sc, mu, N);
            determine_c0(series, e);
            rc.residual = verify_finite_sum(e, series);
            rc.certified = rc.next1 <= tol && rc.next2 <= tol && rc.residual <= tol;
        } catch (const Error& err) {
            rc.note = err.what();
        }
        (rc.certified ? cand.certified : cand.uncertified).push_back(rc);
    }
    return cand;
}

} // namespace heun
