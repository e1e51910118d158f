#pragma once

// Shared fixtures: reproducible random parameters and small comparison helpers.

#include <cmath>
#include <complex>
#include <random>

#include "heun_gamma/equations.hpp"
#include "heun_gamma/recurrence.hpp"

namespace heun::testing {

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    /// Uniform in the annulus 0.1 <= |z| < 1; the inner cut keeps preconditions
    /// such as eps != 0 comfortably satisfied.
    cplx unit_disc() { return std::polar(uniform(0.1, 1.0), uniform(-num::kPi, num::kPi)); }

    cplx box(double half) { return {uniform(-half, half), uniform(-half, half)}; }

    ConfluentHeun equation(Variant v) {
        return {v, unit_disc(), unit_disc(), unit_disc(), unit_disc(), unit_disc()};
    }

    /// Parameters in the unit polydisc accepted by the scheme's preconditions.
    ConfluentHeun admissible(const RecurrenceScheme& sc) {
        for (;;) {
            ConfluentHeun eq = equation(sc.variant);
            try {
                build_recurrence(eq, sc);
                return eq;
            } catch (const PreconditionError&) {
            }
        }
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace heun::testing
