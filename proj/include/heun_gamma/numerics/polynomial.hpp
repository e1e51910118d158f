#pragma once

// Dense complex polynomials (ascending coefficients) and an Aberth-Ehrlich
// root finder.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <utility>
#include <vector>

#include "heun_gamma/errors.hpp"
#include "heun_gamma/numerics/special.hpp"

namespace heun::num {

class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<cplx> coeffs) : c_(coeffs) { trim(); }
    explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(cplx constant) : c_{constant} { trim(); } // NOLINT: scalars promote

    static Polynomial monomial(std::size_t k, cplx coeff = 1.0) {
        std::vector<cplx> c(k + 1, 0.0);
        c[k] = coeff;
        return Polynomial(std::move(c));
    }

    /// prod (z - r_i)
    static Polynomial from_roots(const std::vector<cplx>& roots) {
        Polynomial p{1.0};
        for (const cplx& r : roots) p = p * Polynomial{-r, 1.0};
        return p;
    }

    /// Degree, or -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx operator[](std::size_t k) const { return k < c_.size() ? c_[k] : cplx{0.0, 0.0}; }
    cplx leading() const { return c_.empty() ? cplx{0.0, 0.0} : c_.back(); }

    cplx operator()(cplx z) const {
        cplx r = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * z + *it;
        return r;
    }

    /// Sum of |c_k| |z|^k, the natural scale for judging |p(z)|.
    double magnitude_at(cplx z) const {
        const double az = std::abs(z);
        double r = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * az + std::abs(*it);
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const cplx& x : c_) m = std::max(m, std::abs(x));
        return m;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    /// Coefficients of p(z + s).
    Polynomial shift(cplx s) const {
        std::vector<cplx> a = c_;
        const std::size_t n = a.size();
        // repeated synthetic division (Taylor shift)
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t k = n - 1; k > i; --k) a[k - 1] += s * a[k];
        }
        return Polynomial(std::move(a));
    }

    /// Drops coefficients below tol * max|c| from the top.
    Polynomial chopped(double tol) const {
        std::vector<cplx> a = c_;
        const double m = max_abs_coeff();
        while (!a.empty() && std::abs(a.back()) <= tol * m) a.pop_back();
        return Polynomial(std::move(a));
    }

    /// Quotient by (z - r), discarding the remainder.
    Polynomial deflate(cplx r) const {
        if (c_.size() <= 1) return {};
        std::vector<cplx> q(c_.size() - 1);
        cplx carry = 0.0;
        for (std::size_t k = c_.size() - 1; k >= 1; --k) {
            carry = c_[k] + carry * r;
            q[k - 1] = carry;
        }
        return Polynomial(std::move(q));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
    Polynomial& operator*=(cplx s) {
        for (cplx& x : c_) x *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
    friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<cplx> r(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == cplx{0.0, 0.0}) c_.pop_back();
    }

    std::vector<cplx> c_;
};

namespace detail {

inline void newton_polish(const Polynomial& p, const Polynomial& dp, cplx& z) {
    for (int it = 0; it < 3; ++it) {
        const cplx d = dp(z);
        if (d == cplx{0.0, 0.0}) return;
        const cplx step = p(z) / d;
        const cplx candidate = z - step;
        if (std::abs(p(candidate)) >= std::abs(p(z))) return;
        z = candidate;
    }
}

} // namespace detail

/// All roots of p with multiplicity (Aberth-Ehrlich iteration, Newton polish).
///
/// Exact zero roots are split off first so that z^k reports k exact zeros.
inline std::vector<cplx> polynomial_roots(const Polynomial& p, std::size_t max_iter = 500) {
    if (p.degree() < 1) throw PreconditionError("polynomial_roots requires degree >= 1");
    std::vector<cplx> roots;
    std::size_t low = 0;
    while (p[low] == cplx{0.0, 0.0}) ++low;
    roots.assign(low, cplx{0.0, 0.0});
    std::vector<cplx> rest(p.coeffs().begin() + static_cast<std::ptrdiff_t>(low), p.coeffs().end());
    const Polynomial q(rest);
    const int n = q.degree();
    if (n == 0) return roots;
    if (n == 1) {
        roots.push_back(-q[0] / q[1]);
        return roots;
    }

    const Polynomial dq = q.derivative();
    // initial guesses on a circle of the Cauchy-bound-like radius, offset in angle
    double radius = 0.0;
    for (int k = 0; k < n; ++k) {
        radius = std::max(radius, std::pow(std::abs(q[k] / q.leading()), 1.0 / (n - k)));
    }
    if (radius == 0.0) radius = 1.0;
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n + 0.4;
        z[k] = std::polar(radius, th);
    }

    bool converged = false;
    for (std::size_t it = 0; it < max_iter && !converged; ++it) {
        converged = true;
        for (int i = 0; i < n; ++i) {
            const cplx pv = q(z[i]);
            if (std::abs(pv) <= 1e-15 * q.magnitude_at(z[i])) continue;
            const cplx ratio = pv / dq(z[i]);
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            const cplx w = ratio / (1.0 - ratio * sum);
            if (!is_finite(w)) continue;
            z[i] -= w;
            if (std::abs(w) > 1e-14 * std::max(1.0, std::abs(z[i]))) converged = false;
        }
    }
    if (!converged) {
        for (const cplx& r : z) {
            if (std::abs(q(r)) > 1e-10 * q.magnitude_at(r)) {
                throw ConvergenceError("Aberth iteration did not converge within the iteration cap");
            }
        }
    }
    for (cplx& r : z) {
        detail::newton_polish(q, dq, r);
        roots.push_back(r);
    }
    return roots;
}

/// Groups values closer than tol (relative to max(1, |x|)) into clusters,
/// returning cluster means and sizes.
inline std::vector<std::pair<cplx, std::size_t>> cluster_points(const std::vector<cplx>& xs, double tol) {
    std::vector<std::pair<cplx, std::size_t>> out;
    std::vector<bool> used(xs.size(), false);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (used[i]) continue;
        cplx sum = xs[i];
        std::size_t count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            if (!used[j] && std::abs(xs[j] - xs[i]) <= tol * std::max(1.0, std::abs(xs[i]))) {
                used[j] = true;
                sum += xs[j];
                ++count;
            }
        }
        out.emplace_back(sum / static_cast<double>(count), count);
    }
    return out;
}

} // namespace heun::num
