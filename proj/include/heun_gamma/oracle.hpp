#pragma once

// Independent checks: Dormand-Prince integration of the original equation
// along complex paths, power-series residuals of v under the derived
// operator, and series-versus-integrator comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "heun_gamma/equations.hpp"
#include "heun_gamma/errors.hpp"
#include "heun_gamma/expansion.hpp"
#include "heun_gamma/numerics/polynomial.hpp"

namespace heun {

struct SolutionSample {
    cplx z, u, u_prime;
};

namespace detail {

using OdeState = std::array<cplx, 2>;
namespace ode = boost::numeric::odeint;
using Dopri5 = ode::runge_kutta_dopri5<OdeState, double, OdeState, double>;

// dY/dt along z = a + t (b - a), t in [0, 1].
struct SegmentRhs {
    const ConfluentHeun* eq;
    Polynomial P, Q, R;
    cplx a, dz;

    void operator()(const OdeState& y, OdeState& dy, double t) const {
        const cplx z = a + t * dz;
        dy[0] = dz * y[1];
        dy[1] = -dz * (Q(z) * y[1] + R(z) * y[0]) / P(z);
    }
};

inline double distance_to_segment(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

} // namespace detail

struct IntegratorOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double min_dt = 1e-14;
    std::size_t max_steps = 2'000'000;
};

/// Adaptive 5(4) integration of the equation along the piecewise-linear
/// path; returns one sample per waypoint.
inline std::vector<SolutionSample> integrate_reference(const ConfluentHeun& eq, const SolutionSample& start,
                                                       const std::vector<cplx>& path,
                                                       const IntegratorOptions& opt = {}) {
    if (path.empty() || path.front() != start.z) throw PreconditionError("path must begin at the start sample");
    const Polynomial P = eq.P();
    std::vector<cplx> sing;
    if (P.degree() >= 1) sing = num::polynomial_roots(P);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        for (cplx s : sing)
            if (detail::distance_to_segment(s, path[i], path[i + 1]) < 1e-3)
                throw SingularPathError("integration path passes within 1e-3 of a singular point");

    std::vector<SolutionSample> out{start};
    detail::OdeState y{start.u, start.u_prime};
    auto stepper = detail::ode::make_controlled(opt.abs_tol, opt.rel_tol, detail::Dopri5());
    std::size_t steps = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        detail::SegmentRhs rhs{&eq, P, eq.Q(), eq.R(), path[i], path[i + 1] - path[i]};
        double t = 0.0, dt = 0.05;
        while (t < 1.0) {
            if (t + dt > 1.0) dt = 1.0 - t;
            const auto res = stepper.try_step(rhs, y, t, dt);
            if (res == detail::ode::fail) {
                if (dt < opt.min_dt) throw StepUnderflowError("step size fell below the minimum");
                continue;
            }
            if (++steps > opt.max_steps) throw StepUnderflowError("step budget exhausted");
        }
        out.push_back({path[i + 1], y[0], y[1]});
    }
    return out;
}

/// Fixed-step 5th-order integration from a to b (for order checks).
inline SolutionSample integrate_fixed(const ConfluentHeun& eq, const SolutionSample& start, cplx b,
                                      std::size_t steps) {
    detail::SegmentRhs rhs{&eq, eq.P(), eq.Q(), eq.R(), start.z, b - start.z};
    detail::OdeState y{start.u, start.u_prime};
    detail::Dopri5 stepper;
    const double dt = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) stepper.do_step(rhs, y, static_cast<double>(i) * dt, dt);
    return {b, y[0], y[1]};
}

/// Path from `from` to `to` around `center`: radial leg at the starting
/// angle, then an arc (chords of at most 0.05 rad) that never crosses the
/// branch cut arg(z - center) = pi.
inline std::vector<cplx> polar_path(cplx center, cplx from, cplx to) {
    const cplx a = from - center, b = to - center;
    const double ra = std::abs(a), rb = std::abs(b);
    const double ta = std::arg(a), tb = std::arg(b);
    std::vector<cplx> path{from};
    if (std::abs(rb - ra) > 0.0) path.push_back(center + std::polar(rb, ta));
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(tb - ta) / 0.05)));
    for (int k = 1; k <= pieces; ++k) path.push_back(center + std::polar(rb, ta + (tb - ta) * k / pieces));
    path.back() = to;
    return path;
}

struct ResidualReport {
    std::vector<double> magnitudes; ///< |r_e| for the fully determined orders
    double scale = 0.0;
    double max_relative() const {
        double m = 0.0;
        for (double x : magnitudes) m = std::max(m, x);
        return scale > 0.0 ? m / scale : m;
    }
};

/// Power-series coefficients of A v'' + B v' + C v about z1 for the truncated
/// v = sum_{n<=N} c_n (z - z1)^{n+mu}, restricted to orders not influenced by
/// the missing c_{N+1}, c_{N+2}, ...
inline ResidualReport residual_power_series(const RationalOperator& op, cplx mu, const std::vector<cplx>& c,
                                            cplx z1) {
    const Polynomial a = op.A.shift(z1), b = op.B.shift(z1), cc = op.C.shift(z1);
    const double opscale = std::max({a.max_abs_coeff(), b.max_abs_coeff(), cc.max_abs_coeff()});
    auto order = [&](const Polynomial& p) {
        int k = 0;
        while (k <= p.degree() && std::abs(p[static_cast<std::size_t>(k)]) <= 1e-13 * opscale) ++k;
        return p.degree() < 0 ? 1 << 20 : k;
    };
    const int N = static_cast<int>(c.size()) - 1;
    // coefficient r_e of (z - z1)^{mu + e} involves c_n for n <= e + h
    const int h = std::max({2 - order(a), 1 - order(b), -order(cc)});
    const int e_min = -2;
    const int e_max = N - h;
    ResidualReport rep;
    double cmax = 0.0;
    for (const cplx& x : c) cmax = std::max(cmax, std::abs(x));
    rep.scale = cmax * opscale * std::pow(static_cast<double>(N) + std::abs(mu) + 2.0, 2.0);
    for (int e = e_min; e <= e_max; ++e) {
        cplx r = 0.0;
        for (int n = 0; n <= N; ++n) {
            const cplx nu = static_cast<double>(n) + mu;
            const int ka = e + 2 - n, kb = e + 1 - n, kc = e - n;
            if (ka >= 0) r += a[static_cast<std::size_t>(ka)] * c[n] * nu * (nu - 1.0);
            if (kb >= 0) r += b[static_cast<std::size_t>(kb)] * c[n] * nu;
            if (kc >= 0) r += cc[static_cast<std::size_t>(kc)] * c[n];
        }
        rep.magnitudes.push_back(std::abs(r));
    }
    return rep;
}

/// Probe points at radii in [0.2 R', 0.5 R'] around the center, R' the
/// convergence radius (1 when unbounded); deterministic.
inline std::vector<cplx> default_probes(const GammaSeries& g, std::size_t count = 20) {
    const double R = std::isfinite(g.radius) ? g.radius : 1.0;
    std::vector<cplx> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double frac = count > 1 ? static_cast<double>(k) / static_cast<double>(count - 1) : 0.0;
        const double r = R * (0.2 + 0.3 * frac);
        const double th = std::remainder(0.3 + 2.399963229728653 * static_cast<double>(k), 2.0 * num::kPi);
        out.push_back(g.z1 + std::polar(r, std::clamp(th, -num::kPi + 0.05, num::kPi - 0.05)));
    }
    return out;
}

struct ComparisonPoint {
    cplx z, u_series, u_reference;
    double error = 0.0;
};

/// Starts the integrator from the series at probes[0] and returns the worst
/// |u_series - u_RK| / (|u_RK| + 1) over the other probes.
inline double compare(const GammaSeries& g, const ConfluentHeun& eq, const std::vector<cplx>& probes,
                      std::vector<ComparisonPoint>* details = nullptr) {
    if (probes.empty()) return 0.0;
    const SeriesValue base = evaluate(g, probes[0]);
    const SolutionSample start{probes[0], base.u, base.du};
    double worst = 0.0;
    for (std::size_t i = 1; i < probes.size(); ++i) {
        const auto samples = integrate_reference(eq, start, polar_path(g.z1, probes[0], probes[i]));
        const cplx u_ref = samples.back().u;
        const cplx u_ser = evaluate(g, probes[i]).u;
        const double err = std::abs(u_ser - u_ref) / (std::abs(u_ref) + 1.0);
        worst = std::max(worst, err);
        if (details) details->push_back({probes[i], u_ser, u_ref, err});
    }
    return worst;
}

} // namespace heun
