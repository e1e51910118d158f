#include <gtest/gtest.h>

#include "heun_gamma/oracle.hpp"
#include "heun_gamma/termination.hpp"
#include "support.hpp"

using namespace heun;
using heun::testing::Draws;
using heun::testing::rel_err;

TEST(RhsAlpha, Examples) {
    const ConfluentHeun s{Variant::SCHE, 1.0, 1.0, 1.0, 0.0, 0.0};
    EXPECT_LT(std::abs(rhs_alpha(s, scheme_from_id("sche-I-origin"), 1, 0.0) - 3.0), 1e-15);
    const ConfluentHeun d{Variant::DCHE, 1.0, 0.5, 2.0, 0.0, 0.0};
    EXPECT_LT(std::abs(rhs_alpha(d, scheme_from_id("dche-I-origin"), 2, 0.0) - 5.0), 1e-15);
    const ConfluentHeun b{Variant::BCHE, 1.0, 0.5, 2.0, 1.0, 0.3};
    EXPECT_THROW(rhs_alpha(b, scheme_from_id("bche-I-origin"), 2, 0.0), UnsupportedSchemeError);
    const ConfluentHeun t{Variant::TCHE, 1.0, 0.5, 2.0, 1.0, 0.3};
    for (const char* id : {"tche-I-z0", "tche-IIq-z0", "tche-IIc-z0"})
        EXPECT_THROW(rhs_alpha(t, scheme_from_id(id), 2, 0.0), UnsupportedSchemeError);
}

TEST(QPolynomials, StructureAndConsistency) {
    ConfluentHeun eq{Variant::SCHE, 1.0, 1.0, 1.0, 3.0, 0.0};
    const auto sc = scheme_from_id("sche-I-origin");
    const auto cl = coefficients_as_q_polynomials(eq, sc, 0.0, 3);
    EXPECT_EQ(cl[0].d.coeffs(), std::vector<cplx>{1.0});
    for (std::size_t n = 0; n < cl.size(); ++n) EXPECT_LE(cl[n].d.degree(), static_cast<int>(2 * n));
    EXPECT_FALSE(cl[2].d.is_zero());

    Draws d(61);
    for (int i = 0; i < 10; ++i) {
        eq.q = d.unit_disc();
        const auto seq = generate_coefficients(build_recurrence(eq, sc), 0.0, 5);
        for (std::size_t n = 0; n <= 5; ++n)
            EXPECT_LE(std::abs(cl[n].d(eq.q) / cl[n].clear(eq.q) - seq.c[n]), 1e-10 * (1.0 + std::abs(seq.c[n])));
    }
}

TEST(FindQ, ScheOriginExample) {
    ConfluentHeun eq{Variant::SCHE, 1.0, 1.0, 1.0, 3.0, 0.0};
    const auto sc = scheme_from_id("sche-I-origin");
    const auto cand = find_terminating_q(eq, sc, 1, 0.0);
    ASSERT_FALSE(cand.certified.empty());
    for (const auto& rc : cand.certified) {
        EXPECT_LE(rc.residual, 1e-8);
        eq.q = rc.q;
        const auto seq = generate_coefficients(build_recurrence(eq, sc), 0.0, 4);
        const double scale = std::max(std::abs(seq.c[0]), std::abs(seq.c[1]));
        EXPECT_LE(std::abs(seq.c[4]), 1e-8 * scale);

        auto g = assemble(eq, sc, cplx{0.0, 0.0}, 1);
        determine_c0(g, eq);
        EXPECT_LE(compare(g, eq, default_probes(g)), 1e-8);

        ConfluentHeun off = eq;
        off.q += 1e-3;
        auto h = assemble(off, sc, cplx{0.0, 0.0}, 1);
        determine_c0(h, off);
        EXPECT_GT(verify_finite_sum(off, h), 1e-5);
    }
}

TEST(FindQ, DoubleConfluentExample) {
    const ConfluentHeun eq{Variant::DCHE, 1.0, 0.5, 2.0, 3.0, 0.0};
    EXPECT_FALSE(find_terminating_q(eq, scheme_from_id("dche-I-origin"), 1, 0.0).certified.empty());
}

TEST(FindQ, UnsupportedAndEmpty) {
    const ConfluentHeun b{Variant::BCHE, 1.0, 0.5, 2.0, 1.0, 0.3};
    EXPECT_THROW(find_terminating_q(b, scheme_from_id("bche-II-z0"), 1, 2.0), UnsupportedSchemeError);
    EXPECT_THROW(find_terminating_q(b, scheme_from_id("bche-I-origin"), 1, 0.0), UnsupportedSchemeError);
}

TEST(VerifyFiniteSum, ConstantSolvesTruncatedEquation) {
    const ConfluentHeun eq{Variant::SCHE, cplx{0.4, 0.2}, 0.3, cplx{0.5, 0.1}, 0.7, 0.2};
    auto g = assemble(eq, scheme_from_id("sche-I-origin"), cplx{0.0, 0.0}, 3);
    std::fill(g.coeffs.c.begin(), g.coeffs.c.end(), cplx{0.0, 0.0});
    g.c0 = 1.0;
    ConfluentHeun trivial = eq;
    trivial.alpha = 0.0;
    trivial.q = 0.0;
    EXPECT_EQ(verify_finite_sum(trivial, g), 0.0);
}

// The claim that one condition suffices, checked over random draws.
TEST(FindQ, SingleConditionCollapse) {
    Draws d(62);
    for (const char* id : {"sche-I-origin", "dche-I-origin"}) {
        const auto sc = scheme_from_id(id);
        for (std::size_t N = 1; N <= 3; ++N) {
            for (int trial = 0; trial < 5; ++trial) {
                ConfluentHeun eq = d.equation(sc.variant);
                eq.alpha = rhs_alpha(eq, sc, N, 0.0);
                const auto cand = find_terminating_q(eq, sc, N, 0.0);
                EXPECT_FALSE(cand.certified.empty()) << id << " N=" << N;
                for (const auto& rc : cand.certified) EXPECT_LE(rc.residual, 1e-8);
            }
        }
    }
}
