#pragma once

// The four confluent Heun equations P u'' + Q u' + (alpha z - q) u = 0, the
// general Heun equation, and the operator satisfied by the weighted
// derivative v = e^Lambda u'.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heun_gamma/errors.hpp"
#include "heun_gamma/numerics/polynomial.hpp"
#include "heun_gamma/numerics/quadrature.hpp"
#include "heun_gamma/numerics/special.hpp"

namespace heun {

using num::cplx;
using num::Polynomial;

enum class Variant { SCHE, DCHE, BCHE, TCHE };

inline std::string to_string(Variant v) {
    switch (v) {
    case Variant::SCHE: return "SCHE";
    case Variant::DCHE: return "DCHE";
    case Variant::BCHE: return "BCHE";
    case Variant::TCHE: return "TCHE";
    }
    return "?";
}

/// A u'' + B u' + C u = 0 with polynomial coefficients.
struct RationalOperator {
    Polynomial A, B, C;

    cplx apply(cplx z, cplx f, cplx fp, cplx fpp) const { return A(z) * fpp + B(z) * fp + C(z) * f; }
};

struct ConfluentHeun {
    Variant variant = Variant::SCHE;
    cplx gamma, delta, epsilon, alpha, q;

    Polynomial P() const {
        switch (variant) {
        case Variant::SCHE: return Polynomial{0.0, -1.0, 1.0};
        case Variant::DCHE: return Polynomial{0.0, 0.0, 1.0};
        case Variant::BCHE: return Polynomial{0.0, 1.0};
        case Variant::TCHE: return Polynomial{1.0};
        }
        return {};
    }

    /// First-derivative coefficient. The single-confluent equation keeps its
    /// divided form u'' + (gamma/z + delta/(z-1) + eps) u' + ..., multiplied by z(z-1).
    Polynomial Q() const {
        if (variant == Variant::SCHE) {
            return Polynomial{-gamma, gamma + delta - epsilon, epsilon};
        }
        return Polynomial{gamma, delta, epsilon};
    }

    Polynomial R() const { return Polynomial{-q, alpha}; }

    RationalOperator u_operator() const { return {P(), Q(), R()}; }

    /// The constant lambda of the truncated equation: the irregularity rate at infinity.
    cplx irregularity() const {
        switch (variant) {
        case Variant::SCHE:
        case Variant::DCHE: return epsilon;
        case Variant::BCHE: return delta;
        case Variant::TCHE: return gamma;
        }
        return 0.0;
    }

    void check_finite() const {
        for (cplx x : {gamma, delta, epsilon, alpha, q})
            if (!num::is_finite(x)) throw PreconditionError("equation parameters must be finite");
    }
};

/// General Heun equation in its Fuchsian normal form.
struct GeneralHeun {
    cplx a, alpha, beta, gamma, delta, epsilon, q;

    GeneralHeun(cplx a_, cplx alpha_, cplx beta_, cplx gamma_, cplx delta_, cplx epsilon_, cplx q_)
        : a(a_), alpha(alpha_), beta(beta_), gamma(gamma_), delta(delta_), epsilon(epsilon_), q(q_) {
        if (std::abs(a) < 1e-14 || std::abs(a - 1.0) < 1e-14)
            throw PreconditionError("general Heun equation requires a not in {0, 1}");
        const cplx fuchs = gamma + delta + epsilon - alpha - beta - 1.0;
        if (std::abs(fuchs) > 1e-12 * (1.0 + std::abs(alpha) + std::abs(beta)))
            throw PreconditionError("Fuchs condition gamma + delta + epsilon = alpha + beta + 1 violated");
    }

    RationalOperator u_operator() const {
        const Polynomial z0{0.0, 1.0}, z1{-1.0, 1.0}, za{-a, 1.0};
        return {z0 * z1 * za, gamma * (z1 * za) + delta * (z0 * za) + epsilon * (z0 * z1),
                Polynomial{-q, alpha * beta}};
    }
};

/// Weight of v = e^{Lambda(z)} u'.
struct WeightSpec {
    cplx center;
    Polynomial lambda;

    /// Lambda(z) = s (z - center)^p / p.
    static WeightSpec power(cplx center, cplx s, int p) {
        return {center, Polynomial::monomial(static_cast<std::size_t>(p), s / static_cast<double>(p)).shift(-center)};
    }
};

/// z0 = q / alpha, the extra singular point of the derivative equation.
inline cplx extra_singularity(const ConfluentHeun& eq) {
    if (eq.alpha == cplx{0.0, 0.0}) throw DegenerateError("alpha = 0 puts the extra singularity at infinity");
    return eq.q / eq.alpha;
}

namespace detail {

inline bool vanishes_at(const Polynomial& p, cplx r, double tol) {
    return p.is_zero() || std::abs(p(r)) <= tol * p.magnitude_at(r);
}

} // namespace detail

/// Cancels common linear factors of A, B, C (matched within tol relative) and
/// scales so the largest coefficient of A has unit modulus.
inline RationalOperator normalize_operator(RationalOperator op, double tol = 1e-10) {
    if (op.A.is_zero()) throw DegenerateError("operator has no second-derivative term");
    bool changed = true;
    while (changed && op.A.degree() >= 1) {
        changed = false;
        const auto clusters = num::cluster_points(num::polynomial_roots(op.A), 1e-6);
        for (const auto& [r, mult] : clusters) {
            if (detail::vanishes_at(op.B, r, tol) && detail::vanishes_at(op.C, r, tol)) {
                op.A = op.A.deflate(r);
                op.B = op.B.deflate(r);
                op.C = op.C.deflate(r);
                changed = true;
                break;
            }
        }
    }
    const double s = op.A.max_abs_coeff();
    op.A *= 1.0 / s;
    op.B *= 1.0 / s;
    op.C *= 1.0 / s;
    return op;
}

/// Operator satisfied by v = e^Lambda u' when u solves op_u.
///
/// From u = -e^{-Lambda}(A v' + (B - A Lambda') v)/C and u' = e^{-Lambda} v.
inline RationalOperator derive_v_equation(const RationalOperator& op_u, const WeightSpec& w) {
    const Polynomial& A = op_u.A;
    const Polynomial& B = op_u.B;
    const Polynomial& C = op_u.C;
    if (C.is_zero()) throw DegenerateError("last term vanishes identically; the solution is a quadrature");
    const Polynomial dL = w.lambda.derivative();
    const Polynomial N = B - A * dL;
    const Polynomial K = C * dL + C.derivative();
    RationalOperator v;
    v.A = C * A;
    v.B = C * (A.derivative() + N) - K * A;
    v.C = C * N.derivative() - K * N + C * C;
    return normalize_operator(v);
}

/// Distinct finite singular points (roots of A) of a normalized operator.
inline std::vector<cplx> singular_points(const RationalOperator& op) {
    std::vector<cplx> out;
    if (op.A.degree() < 1) return out;
    for (const auto& [r, mult] : num::cluster_points(num::polynomial_roots(op.A), 1e-6)) out.push_back(r);
    return out;
}

/// Roots of the indicial equation at a regular singular point, descending real part.
inline std::pair<cplx, cplx> indicial_exponents(const RationalOperator& op, cplx z_pt, double tol = 1e-9) {
    const Polynomial a = op.A.shift(z_pt), b = op.B.shift(z_pt), c = op.C.shift(z_pt);
    const double scale = std::max({a.max_abs_coeff(), b.max_abs_coeff(), c.max_abs_coeff()});
    auto order = [&](const Polynomial& p) {
        int k = 0;
        while (k <= p.degree() && std::abs(p[static_cast<std::size_t>(k)]) <= tol * scale) ++k;
        return k;
    };
    const int m = order(a);
    if (m == 0) throw NotSingularError("point is an ordinary point of the operator");
    if (order(b) < m - 1 || order(c) < m - 2)
        throw IrregularError("point is an irregular singular point of the operator");
    const cplx am = a[static_cast<std::size_t>(m)];
    const cplx p0 = b[static_cast<std::size_t>(m - 1)] / am;
    const cplx q0 = m >= 2 ? c[static_cast<std::size_t>(m - 2)] / am : cplx{0.0, 0.0};
    // mu^2 + (p0 - 1) mu + q0 = 0
    const cplx bb = p0 - 1.0;
    const cplx disc = std::sqrt(bb * bb - 4.0 * q0);
    cplx r1 = 0.5 * (-bb + disc), r2 = 0.5 * (-bb - disc);
    if (r2.real() > r1.real()) std::swap(r1, r2);
    return {r1, r2};
}

// ---------------------------------------------------------------------------
// Closed-form special cases

enum class ClosedFormKind { Quadrature, BiconfluentKummer, TriconfluentKummer };

inline std::string to_string(ClosedFormKind k) {
    switch (k) {
    case ClosedFormKind::Quadrature: return "quadrature";
    case ClosedFormKind::BiconfluentKummer: return "biconfluent-kummer";
    case ClosedFormKind::TriconfluentKummer: return "triconfluent-kummer";
    }
    return "?";
}

struct ValueDeriv {
    cplx u, du;
};

/// A two-constant general solution u = C1 u1 + C2 u2.
class ClosedForm {
public:
    ClosedForm(ClosedFormKind kind, ConfluentHeun eq) : kind_(kind), eq_(eq) {
        if (kind_ == ClosedFormKind::Quadrature) base_ = quadrature_base(eq.variant);
    }

    ClosedFormKind kind() const { return kind_; }
    std::string name() const { return to_string(kind_); }
    const std::string& description() const { return description_; }
    void set_description(std::string d) { description_ = std::move(d); }

    /// Lower integration limit of the quadrature form.
    cplx base() const { return base_; }

    /// Basis function i (1 or 2) and its derivative.
    ValueDeriv basis(int i, cplx z) const {
        switch (kind_) {
        case ClosedFormKind::Quadrature: return quadrature_basis(i, z);
        case ClosedFormKind::BiconfluentKummer: return biconfluent_basis(i, z);
        case ClosedFormKind::TriconfluentKummer: return triconfluent_basis(i, z);
        }
        return {};
    }

    ValueDeriv evaluate(cplx c1, cplx c2, cplx z) const {
        const ValueDeriv b1 = basis(1, z), b2 = basis(2, z);
        return {c1 * b1.u + c2 * b2.u, c1 * b1.du + c2 * b2.du};
    }

    /// Constants reproducing (u, u') at z.
    std::pair<cplx, cplx> fit(cplx z, cplx u, cplx du) const {
        const ValueDeriv b1 = basis(1, z), b2 = basis(2, z);
        const cplx det = b1.u * b2.du - b2.u * b1.du;
        if (std::abs(det) == 0.0) throw DegenerateError("closed-form basis is degenerate at the fitting point");
        return {(u * b2.du - b2.u * du) / det, (b1.u * du - u * b1.du) / det};
    }

    /// e^{-lambda z} F(z), the integrand of the quadrature form.
    cplx integrand(cplx z) const {
        const cplx g = eq_.gamma, d = eq_.delta, e = eq_.epsilon;
        const cplx lam = eq_.irregularity();
        switch (eq_.variant) {
        case Variant::SCHE:
            return std::exp(-lam * z) * num::principal_pow(1.0 - z, -d) * num::principal_pow(z, -g);
        case Variant::DCHE: return std::exp(-lam * z + g / z) * num::principal_pow(z, -d);
        case Variant::BCHE: return std::exp(-lam * z - e * z * z / 2.0) * num::principal_pow(z, -g);
        case Variant::TCHE: return std::exp(-lam * z - d * z * z / 2.0 - e * z * z * z / 3.0);
        }
        return 0.0;
    }

private:
    static cplx quadrature_base(Variant v) {
        switch (v) {
        case Variant::SCHE: return 0.5;
        case Variant::DCHE:
        case Variant::BCHE: return 1.0;
        case Variant::TCHE: return 0.0;
        }
        return 0.0;
    }

    ValueDeriv quadrature_basis(int i, cplx z) const {
        if (i == 1) return {1.0, 0.0};
        const cplx integral =
            num::integrate_segment([this](cplx t) { return integrand(t); }, base_, z, 1e-13);
        return {integral, integrand(z)};
    }

    // 1F1(a; b; w(z)) and its z-derivative for w = k (z - c)^p.
    static ValueDeriv kummer_of_power(cplx a, cplx b, cplx k, cplx c, int p, cplx z) {
        const cplx x = z - c;
        const cplx w = k * num::principal_pow(x, static_cast<double>(p));
        const cplx dw = k * static_cast<double>(p) * num::principal_pow(x, static_cast<double>(p - 1));
        return {num::kummer_1f1(a, b, w), a / b * num::kummer_1f1(a + 1.0, b + 1.0, w) * dw};
    }

    ValueDeriv biconfluent_basis(int i, cplx z) const {
        const cplx g = eq_.gamma, e = eq_.epsilon, al = eq_.alpha;
        const cplx k = -e / 2.0;
        if (i == 1) return kummer_of_power(al / (2.0 * e), (1.0 + g) / 2.0, k, 0.0, 2, z);
        const ValueDeriv f = kummer_of_power(al / (2.0 * e) + (1.0 - g) / 2.0, (3.0 - g) / 2.0, k, 0.0, 2, z);
        const cplx zp = num::principal_pow(z, 1.0 - g);
        const cplx dzp = (1.0 - g) * num::principal_pow(z, -g);
        return {zp * f.u, dzp * f.u + zp * f.du};
    }

    ValueDeriv triconfluent_basis(int i, cplx z) const {
        const cplx e = eq_.epsilon, al = eq_.alpha;
        const cplx z0 = eq_.q / al;
        const cplx k = -e / 3.0;
        if (i == 1) return kummer_of_power(al / (3.0 * e), 2.0 / 3.0, k, z0, 3, z);
        const ValueDeriv f = kummer_of_power(al / (3.0 * e) + 1.0 / 3.0, 4.0 / 3.0, k, z0, 3, z);
        return {(z - z0) * f.u, f.u + (z - z0) * f.du};
    }

    ClosedFormKind kind_;
    ConfluentHeun eq_;
    cplx base_ = 0.0;
    std::string description_;
};

/// Catalogued closed-form general solutions; std::nullopt when none applies.
inline std::optional<ClosedForm> special_closed_form(const ConfluentHeun& eq, double tol = 1e-12) {
    auto small = [tol](cplx x, double scale) { return std::abs(x) <= tol * std::max(1.0, scale); };
    if (small(eq.alpha, 0.0) && small(eq.q, 0.0)) {
        ClosedForm cf(ClosedFormKind::Quadrature, eq);
        cf.set_description("u = C1 + C2 * integral of exp(-lambda z) F(z)");
        return cf;
    }
    if (eq.variant == Variant::BCHE && small(eq.delta, 0.0) && small(eq.q, 0.0) && eq.epsilon != cplx{0.0, 0.0}) {
        const cplx g = eq.gamma;
        if (num::is_nonpositive_integer((1.0 + g) / 2.0) || num::is_nonpositive_integer((3.0 - g) / 2.0))
            return std::nullopt;
        ClosedForm cf(ClosedFormKind::BiconfluentKummer, eq);
        cf.set_description("u = C1 1F1(alpha/(2 eps); (1+gamma)/2; -eps z^2/2) + "
                           "C2 z^(1-gamma) 1F1(alpha/(2 eps) + (1-gamma)/2; (3-gamma)/2; -eps z^2/2)");
        return cf;
    }
    if (eq.variant == Variant::TCHE && eq.alpha != cplx{0.0, 0.0} && eq.epsilon != cplx{0.0, 0.0}) {
        const cplx z0 = eq.q / eq.alpha;
        const double scale = std::abs(eq.epsilon) * (1.0 + std::abs(z0) * std::abs(z0));
        if (small(eq.gamma - eq.epsilon * z0 * z0, scale) && small(eq.delta + 2.0 * eq.epsilon * z0, scale)) {
            ClosedForm cf(ClosedFormKind::TriconfluentKummer, eq);
            cf.set_description("u = C1 1F1(alpha/(3 eps); 2/3; -eps (z-z0)^3/3) + "
                               "C2 (z-z0) 1F1(alpha/(3 eps) + 1/3; 4/3; -eps (z-z0)^3/3)");
            return cf;
        }
    }
    return std::nullopt;
}

} // namespace heun
