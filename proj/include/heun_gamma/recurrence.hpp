#pragma once

// Coefficient recurrences for the Frobenius series of v = e^Lambda u' about
// the origin or the extra singular point z0, for every catalogued scheme.
//
// A relation with k terms reads sum_j f_j(n - j) c_{n-j} = 0, where each f_j is
// stored as a polynomial in nu = (index) + mu.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "heun_gamma/equations.hpp"
#include "heun_gamma/errors.hpp"
#include "heun_gamma/numerics/polynomial.hpp"
#include "heun_gamma/numerics/special.hpp"

namespace heun {

enum class Center { Origin, Extra };
enum class ExpansionType { I, IIq, IIc };

struct RecurrenceScheme {
    Variant variant = Variant::SCHE;
    Center center = Center::Origin;
    ExpansionType type = ExpansionType::I;
    std::optional<cplx> lambda; ///< free weight constant; defaulted when absent

    bool has_free_lambda() const {
        return (variant == Variant::BCHE && type == ExpansionType::I) ||
               (variant == Variant::TCHE && type != ExpansionType::IIc);
    }

    /// Gamma-argument power: 1, 2 or 3.
    int power() const {
        switch (type) {
        case ExpansionType::I: return 1;
        case ExpansionType::IIq: return 2;
        case ExpansionType::IIc: return 3;
        }
        return 1;
    }

    std::string id() const {
        std::string v;
        switch (variant) {
        case Variant::SCHE: v = "sche"; break;
        case Variant::DCHE: v = "dche"; break;
        case Variant::BCHE: v = "bche"; break;
        case Variant::TCHE: v = "tche"; break;
        }
        std::string t;
        switch (type) {
        case ExpansionType::I: t = "I"; break;
        case ExpansionType::IIq: t = variant == Variant::TCHE ? "IIq" : "II"; break;
        case ExpansionType::IIc: t = "IIc"; break;
        }
        return v + "-" + t + "-" + (center == Center::Origin ? "origin" : "z0");
    }
};

inline bool is_catalogued(Variant v, Center c, ExpansionType t) {
    switch (v) {
    case Variant::SCHE:
    case Variant::DCHE: return t == ExpansionType::I;
    case Variant::BCHE: return t == ExpansionType::I || t == ExpansionType::IIq;
    case Variant::TCHE: return c == Center::Extra;
    }
    return false;
}

inline RecurrenceScheme make_scheme(Variant v, Center c, ExpansionType t, std::optional<cplx> lambda = std::nullopt) {
    if (!is_catalogued(v, c, t)) throw PreconditionError("scheme is not one of the eleven catalogued expansions");
    RecurrenceScheme s{v, c, t, lambda};
    if (lambda && !s.has_free_lambda()) throw PreconditionError("scheme has no free weight constant lambda");
    return s;
}

/// Parses ids such as "sche-I-origin", "bche-II-z0", "tche-IIq-z0".
inline RecurrenceScheme scheme_from_id(const std::string& id, std::optional<cplx> lambda = std::nullopt) {
    static const std::array<RecurrenceScheme, 11> all = {{
        {Variant::SCHE, Center::Origin, ExpansionType::I, {}},
        {Variant::SCHE, Center::Extra, ExpansionType::I, {}},
        {Variant::DCHE, Center::Origin, ExpansionType::I, {}},
        {Variant::DCHE, Center::Extra, ExpansionType::I, {}},
        {Variant::BCHE, Center::Origin, ExpansionType::I, {}},
        {Variant::BCHE, Center::Extra, ExpansionType::I, {}},
        {Variant::BCHE, Center::Origin, ExpansionType::IIq, {}},
        {Variant::BCHE, Center::Extra, ExpansionType::IIq, {}},
        {Variant::TCHE, Center::Extra, ExpansionType::I, {}},
        {Variant::TCHE, Center::Extra, ExpansionType::IIq, {}},
        {Variant::TCHE, Center::Extra, ExpansionType::IIc, {}},
    }};
    for (const auto& s : all) {
        if (s.id() == id) return make_scheme(s.variant, s.center, s.type, lambda);
    }
    throw PreconditionError("unknown scheme id '" + id + "'");
}

inline std::vector<RecurrenceScheme> all_schemes() {
    std::vector<RecurrenceScheme> out;
    for (const char* id : {"sche-I-origin", "sche-I-z0", "dche-I-origin", "dche-I-z0", "bche-I-origin", "bche-I-z0",
                           "bche-II-origin", "bche-II-z0", "tche-I-z0", "tche-IIq-z0", "tche-IIc-z0"})
        out.push_back(scheme_from_id(id));
    return out;
}

struct RecurrenceRelation {
    std::vector<Polynomial> terms;   ///< f_0 (leading) ... f_{k-1}, polynomials in nu
    std::vector<std::string> names;  ///< conventional letter for each term
    std::size_t dropped_leading = 0; ///< identically vanishing leading terms removed
    std::vector<cplx> exponents;     ///< admissible mu, descending real part
    bool logarithmic_branch_excluded = false;
    cplx z1;     ///< expansion center
    cplx s;      ///< weight scale: Lambda = s (z - z1)^p / p
    int p = 1;   ///< weight power
    cplx lambda; ///< weight constant actually used (s for free-lambda schemes)
    cplx prefactor = 1.0;

    std::size_t size() const { return terms.size(); }

    /// f_j evaluated at index m for exponent mu.
    cplx coeff(std::size_t j, double m, cplx mu) const { return terms[j](m + mu); }
};

/// Default weight constant of the free-lambda schemes.
inline cplx default_lambda(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    cplx lam = 0.0;
    if (sc.variant == Variant::BCHE) {
        lam = eq.delta;
    } else if (sc.type == ExpansionType::I) {
        lam = eq.gamma;
    } else {
        lam = eq.delta + 2.0 * extra_singularity(eq) * eq.epsilon;
    }
    if (std::abs(lam) < 1e-14) lam = 1.0;
    return lam;
}

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("scheme precondition violated: " + what);
}

inline bool poly_vanishes(const Polynomial& p, double scale, double tol = 1e-13) {
    return p.is_zero() || p.max_abs_coeff() <= tol * scale;
}

inline double terms_scale(const std::vector<Polynomial>& terms) {
    double s = 0.0;
    for (const auto& t : terms) s = std::max(s, t.max_abs_coeff());
    return s;
}

// The raw coefficient functions, before any re-indexing.
inline void raw_terms(const ConfluentHeun& eq, const RecurrenceScheme& sc, cplx lam, cplx Z,
                      std::vector<Polynomial>& terms, std::vector<std::string>& names) {
    const cplx g = eq.gamma, d = eq.delta, e = eq.epsilon, a = eq.alpha, q = eq.q;
    const cplx K = g + d * Z + e * Z * Z;
    using P = Polynomial;
    const bool origin = sc.center == Center::Origin;
    switch (sc.variant) {
    case Variant::SCHE:
        names = {"S", "R", "Q", "P"};
        if (origin) {
            terms = {P{0.0, q * g, q},
                     P{q * q + a * g - q * (g + d + g * e), a * (1.0 - g) - q * (1.0 + g + d + e), -(q + a)},
                     P{-2.0 * q * a + (q + a) * g * e + q * d * e, a * (g + d) + (q + a) * e, a},
                     P{a * (a - e * (g + d)), -a * e}};
        } else {
            terms = {P{0.0, -2.0 * Z * (Z - 1.0), Z * (Z - 1.0)},
                     P{g - Z * (g + d), 1.0 - 2.0 * Z - g + Z * (g + d) - (Z - 1.0) * Z * e, 2.0 * Z - 1.0},
                     P{(g - Z * (g + d)) * e, g + d + (1.0 - 2.0 * Z) * e, 1.0},
                     P{a - e * (g + d), -e}};
        }
        return;
    case Variant::DCHE:
        names = {"S", "R", "Q", "P"};
        if (origin) {
            terms = {P{0.0, -q * g},
                     P{q * (q - d + g * e) - a * g, a * g - q - q * d, -q},
                     P{e * (q * d - a * g) - 2.0 * q * a, a * d + q * e, a},
                     P{a * (a - e * d), -a * e}};
        } else {
            terms = {P{0.0, -2.0 * Z * Z, Z * Z},
                     P{-(g + Z * d), g + Z * (d - 2.0) - Z * Z * e, 2.0 * Z},
                     P{-(g + Z * d) * e, d - 2.0 * Z * e, 1.0},
                     P{a - e * d, -e}};
        }
        return;
    case Variant::BCHE:
        names = {"T", "S", "R", "Q", "P"};
        if (sc.type == ExpansionType::I) {
            const cplx l = lam;
            if (origin) {
                terms = {P{0.0, -q * g, -q},
                         P{q * q - a * g - q * (d - l - g * l), a * g - a + 2.0 * q * l - q * d, a},
                         P{-2.0 * q * (a + e) + l * (q * d - a * g - q * l), a * d - q * e - 2.0 * a * l},
                         P{a * a + q * e * l + a * l * (l - d) + a * e, a * e},
                         P{-a * l * e}};
            } else {
                terms = {P{0.0, -2.0 * Z, Z},
                         P{l * Z - K, g - 1.0 + Z * (d + Z * e - 2.0 * l), 1.0},
                         P{l * l * Z - l * K, d + 2.0 * Z * e - 2.0 * l},
                         P{a + e - l * (d + 2.0 * Z * e - l), e},
                         P{-l * e}};
            }
        } else {
            if (origin) {
                terms = {P{0.0, -q * g, -q},
                         P{q * q - a * g - q * d, a * g - a - q * d, a},
                         P{-2.0 * q * a + q * g * e, a * d + q * e},
                         P{a * a + q * d * e - a * e * g, -a * e},
                         P{-a * d * e}};
            } else {
                terms = {P{0.0, -2.0 * Z, Z}, P{-K, K - 1.0, 1.0}, P{0.0, d}, P{a - e * K, -e},
                         P{-e * (d + e * Z)}};
            }
        }
        return;
    case Variant::TCHE: {
        const cplx l = lam;
        const cplx D = d + 2.0 * e * Z;
        switch (sc.type) {
        case ExpansionType::I:
            names = {"T", "S", "R", "Q", "P"};
            terms = {P{0.0, -2.0, 1.0}, P{l - K, K - 2.0 * l}, P{(l - K) * l, D}, P{a + e - D * l, e}, P{-e * l}};
            return;
        case ExpansionType::IIq:
            names = {"W", "T", "S", "R", "Q", "P"};
            terms = {P{0.0, -2.0, 1.0}, P{-K, K},      P{0.0, D - 2.0 * l},
                     P{a + e - K * l, e}, P{-(D - l) * l}, P{-e * l}};
            return;
        case ExpansionType::IIc:
            names = {"W", "T", "S", "R", "Q", "P"};
            terms = {P{0.0, -2.0, 1.0}, P{-K, K}, P{0.0, D}, P{a, -e}, P{-e * K}, P{-e * D}};
            return;
        }
        return;
    }
    }
}

inline void check_preconditions(const ConfluentHeun& eq, const RecurrenceScheme& sc, cplx lam) {
    eq.check_finite();
    if (!is_catalogued(sc.variant, sc.center, sc.type))
        throw PreconditionError("scheme is not one of the eleven catalogued expansions");
    const cplx zero{0.0, 0.0};
    if (sc.center == Center::Extra) require(eq.alpha != zero, "α ≠ 0 (center z0 = q/α)");
    if (sc.variant == Variant::DCHE) require(eq.gamma != zero, "γ ≠ 0 (DCHE)");
    if (sc.has_free_lambda()) {
        require(lam != zero, "λ ≠ 0");
    } else {
        require(eq.epsilon != zero, "ε ≠ 0");
    }
}

} // namespace detail

/// The relation for a scheme, with identically vanishing leading
/// coefficient functions removed (which shifts the index by one each).
inline RecurrenceRelation build_recurrence(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    const cplx lam = sc.has_free_lambda() ? sc.lambda.value_or(default_lambda(eq, sc)) : eq.epsilon;
    detail::check_preconditions(eq, sc, lam);

    RecurrenceRelation rel;
    const cplx Z = sc.center == Center::Extra ? extra_singularity(eq) : cplx{0.0, 0.0};
    detail::raw_terms(eq, sc, lam, Z, rel.terms, rel.names);
    rel.z1 = Z;
    rel.p = sc.power();
    rel.lambda = lam;
    rel.s = lam;
    if (sc.variant == Variant::SCHE || sc.variant == Variant::DCHE) rel.prefactor = std::exp(-eq.epsilon * Z);

    const double scale = detail::terms_scale(rel.terms);
    while (!rel.terms.empty() && detail::poly_vanishes(rel.terms.front(), scale)) {
        rel.terms.erase(rel.terms.begin());
        rel.names.erase(rel.names.begin());
        ++rel.dropped_leading;
    }
    if (rel.terms.empty() || rel.terms.front().degree() < 1)
        throw DegenerateError("recurrence has no admissible exponent under these parameters");

    std::vector<cplx> mus = num::polynomial_roots(rel.terms.front());
    for (cplx& m : mus) {
        if (std::abs(m.imag()) < 1e-14 * std::max(1.0, std::abs(m))) m = {m.real(), 0.0};
        if (std::abs(m) < 1e-14) m = 0.0;
    }
    std::sort(mus.begin(), mus.end(), [](cplx a, cplx b) { return a.real() > b.real(); });

    const bool log_excluded_scheme =
        (sc.variant == Variant::SCHE && sc.center == Center::Extra) ||
        (sc.variant == Variant::DCHE && sc.center == Center::Extra) ||
        (sc.variant == Variant::TCHE && sc.type != ExpansionType::IIc);
    if (log_excluded_scheme && rel.dropped_leading == 0) {
        std::vector<cplx> kept;
        for (cplx m : mus) {
            if (std::abs(m) < 1e-12) {
                rel.logarithmic_branch_excluded = true;
            } else {
                kept.push_back(m);
            }
        }
        mus = kept;
    }
    rel.exponents = mus;
    return rel;
}

inline std::vector<cplx> admissible_exponents(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    return build_recurrence(eq, sc).exponents;
}

struct CoefficientSequence {
    cplx mu;
    std::vector<cplx> c;                    ///< stored coefficients; true c_n = c[n] * 10^scale_log10
    double scale_log10 = 0.0;
    std::vector<std::size_t> free_indices;  ///< interior indices where c_n was free and set to 0

    std::size_t size() const { return c.size(); }
};

/// c_0 = 1 and c_n from the relation for n = 1..N.
inline CoefficientSequence generate_coefficients(const RecurrenceRelation& rel, cplx mu, std::size_t N) {
    CoefficientSequence seq;
    seq.mu = mu;
    seq.c.assign(N + 1, 0.0);
    seq.c[0] = 1.0;
    const std::size_t k = rel.size();
    for (std::size_t n = 1; n <= N; ++n) {
        cplx rhs = 0.0;
        double mag = 0.0;
        for (std::size_t j = 1; j < k && j <= n; ++j) {
            const cplx t = rel.coeff(j, static_cast<double>(n - j), mu) * seq.c[n - j];
            rhs -= t;
            mag += std::abs(t);
        }
        const cplx nu = static_cast<double>(n) + mu;
        const cplx lead = rel.terms[0](nu);
        if (std::abs(lead) <= 1e-12 * rel.terms[0].magnitude_at(nu)) {
            if (std::abs(rhs) <= 1e-10 * mag || mag == 0.0) {
                seq.c[n] = 0.0;
                seq.free_indices.push_back(n);
                continue;
            }
            throw DegenerateIndexError(n);
        }
        seq.c[n] = rhs / lead;
        if (std::abs(seq.c[n]) > 1e150) {
            for (std::size_t i = 0; i <= n; ++i) seq.c[i] *= 1e-150;
            seq.scale_log10 += 150.0;
        }
    }
    return seq;
}

/// Tries the admissible exponents in order and returns the first sequence
/// that generates without an interior degeneracy.
inline CoefficientSequence generate_first_admissible(const RecurrenceRelation& rel, std::size_t N) {
    for (std::size_t i = 0; i < rel.exponents.size(); ++i) {
        try {
            return generate_coefficients(rel, rel.exponents[i], N);
        } catch (const DegenerateIndexError&) {
            if (i + 1 == rel.exponents.size()) throw;
        }
    }
    throw DegenerateError("no admissible exponent");
}

// ---------------------------------------------------------------------------
// Reductions

struct LambdaChoice {
    std::string term;
    cplx lambda;
};

struct ReductionReport {
    std::vector<std::string> names;
    std::vector<bool> vanishing;
    std::size_t original_terms = 0;
    std::size_t effective_terms = 0;
    bool successive = true;
    std::vector<LambdaChoice> lambda_choices; ///< free-lambda values forcing a term to vanish
};

namespace detail {

inline ReductionReport reduction_of_terms(const std::vector<Polynomial>& terms, const std::vector<std::string>& names) {
    ReductionReport r;
    r.names = names;
    r.original_terms = terms.size();
    const double scale = terms_scale(terms);
    for (const auto& t : terms) r.vanishing.push_back(poly_vanishes(t, scale));
    std::vector<std::size_t> alive;
    for (std::size_t j = 0; j < terms.size(); ++j)
        if (!r.vanishing[j]) alive.push_back(j);
    r.effective_terms = alive.size();
    for (std::size_t i = 1; i < alive.size(); ++i)
        if (alive[i] != alive[i - 1] + 1) r.successive = false;
    return r;
}

} // namespace detail

/// Which coefficient functions vanish identically under the current parameters.
inline ReductionReport detect_reductions(const ConfluentHeun& eq, const RecurrenceScheme& sc) {
    const cplx lam = sc.has_free_lambda() ? sc.lambda.value_or(default_lambda(eq, sc)) : eq.epsilon;
    detail::check_preconditions(eq, sc, lam);
    const cplx Z = sc.center == Center::Extra ? extra_singularity(eq) : cplx{0.0, 0.0};
    std::vector<Polynomial> terms;
    std::vector<std::string> names;
    detail::raw_terms(eq, sc, lam, Z, terms, names);
    ReductionReport r = detail::reduction_of_terms(terms, names);

    if (sc.has_free_lambda()) {
        // every coefficient is at most quadratic in lambda: sample and interpolate
        std::array<std::vector<Polynomial>, 3> samples;
        const std::array<double, 3> ls = {0.0, 1.0, -1.0};
        for (std::size_t i = 0; i < 3; ++i) {
            std::vector<std::string> nm;
            detail::raw_terms(eq, sc, ls[i], Z, samples[i], nm);
        }
        const double scale = detail::terms_scale(samples[1]);
        for (std::size_t j = 0; j < terms.size(); ++j) {
            if (r.vanishing[j]) continue;
            std::size_t width = 0;
            for (std::size_t i = 0; i < 3; ++i)
                width = std::max(width, samples[i][j].coeffs().size());
            std::vector<Polynomial> in_lambda;
            for (std::size_t k = 0; k < width; ++k) {
                const cplx f0 = samples[0][j][k], fp = samples[1][j][k], fm = samples[2][j][k];
                in_lambda.push_back(Polynomial{f0, (fp - fm) / 2.0, (fp + fm) / 2.0 - f0});
            }
            const Polynomial* pivot = nullptr;
            for (const auto& p : in_lambda)
                if (!detail::poly_vanishes(p, scale) && (!pivot || p.degree() < pivot->degree())) pivot = &p;
            if (!pivot || pivot->chopped(1e-13).degree() < 1) continue;
            for (cplx root : num::polynomial_roots(pivot->chopped(1e-13))) {
                if (std::abs(root) < 1e-14) continue;
                bool all = true;
                for (const auto& p : in_lambda)
                    if (std::abs(p(root)) > 1e-10 * std::max(scale, p.magnitude_at(root))) all = false;
                if (all) r.lambda_choices.push_back({names[j], root});
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Two-term closed forms

enum class TwoTermCase { BiconfluentOrigin, TriconfluentCubic };

/// Explicit coefficients of the two-term relations.
///
/// BiconfluentOrigin: BCHE type II about the origin with q = delta = 0, in the
/// closed-form indexing where c_0 = 0, c_1 = 1 and mu in {0, -1-gamma};
/// the factor (eps/2)^k is a plain power, not a rising factorial.
/// TriconfluentCubic: TCHE cubic type II about z0, mu = 0, c_0 = 1, c_1 = c_2 = 0.
inline cplx two_term_closed_form(TwoTermCase which, const ConfluentHeun& eq, std::size_t n, cplx mu = 0.0) {
    const cplx g = eq.gamma, e = eq.epsilon, a = eq.alpha;
    const cplx zero{0.0, 0.0};
    if (which == TwoTermCase::BiconfluentOrigin) {
        if (eq.variant != Variant::BCHE || std::abs(eq.q) > 1e-12 || std::abs(eq.delta) > 1e-12 || a == zero ||
            e == zero)
            throw PreconditionError("two-term BCHE form requires q = delta = 0, alpha != 0, epsilon != 0");
        if (n % 2 == 0) return 0.0;
        const std::size_t k = (n - 1) / 2;
        const cplx num = num::principal_pow(e / 2.0, static_cast<double>(k)) *
                         num::pochhammer((1.0 + g + mu - a / e) / 2.0, k);
        const cplx den = num::pochhammer(1.0 + mu / 2.0, k) * num::pochhammer(1.0 + (1.0 + g + mu) / 2.0, k);
        return num / den;
    }
    if (eq.variant != Variant::TCHE || a == zero || e == zero)
        throw PreconditionError("two-term TCHE form requires alpha != 0, epsilon != 0");
    const cplx z0 = eq.q / a;
    const double scale = std::abs(e) * (1.0 + std::norm(z0));
    if (std::abs(g - e * z0 * z0) > 1e-12 * scale || std::abs(eq.delta + 2.0 * e * z0) > 1e-12 * scale)
        throw PreconditionError("two-term TCHE form requires gamma = eps q^2/alpha^2, delta = -2 eps q/alpha");
    if (n % 3 != 0) return 0.0;
    const std::size_t m = n / 3;
    return num::principal_pow(e / 3.0, static_cast<double>(m)) * num::pochhammer(-a / (3.0 * e), m) /
           (num::pochhammer(1.0 / 3.0, m) * num::pochhammer(1.0, m));
}

} // namespace heun
