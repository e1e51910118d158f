#include <gtest/gtest.h>

#include "heun_gamma/expansion.hpp"
#include "heun_gamma/oracle.hpp"
#include "heun_gamma/recurrence.hpp"
#include "reduction_cases.hpp"
#include "support.hpp"

using namespace heun;
using heun::testing::Draws;
using heun::testing::rel_err;

namespace {
const ConfluentHeun kOnes{Variant::SCHE, 1.0, 1.0, 1.0, 1.0, 1.0};
}

TEST(Schemes, ElevenCatalogued) {
    EXPECT_EQ(all_schemes().size(), 11u);
    EXPECT_FALSE(is_catalogued(Variant::TCHE, Center::Origin, ExpansionType::I));
    EXPECT_FALSE(is_catalogued(Variant::SCHE, Center::Origin, ExpansionType::IIq));
    EXPECT_THROW(make_scheme(Variant::DCHE, Center::Origin, ExpansionType::IIq), PreconditionError);
    EXPECT_THROW(scheme_from_id("sche-II-origin"), PreconditionError);
    for (const auto& sc : all_schemes()) EXPECT_EQ(scheme_from_id(sc.id()).id(), sc.id());
}

TEST(Schemes, TermCounts) {
    Draws d(41);
    for (const auto& sc : all_schemes()) {
        const auto rel = build_recurrence(d.admissible(sc), sc);
        std::size_t expect = 4;
        if (sc.variant == Variant::BCHE || (sc.variant == Variant::TCHE && sc.type == ExpansionType::I)) expect = 5;
        if (sc.variant == Variant::TCHE && sc.type != ExpansionType::I) expect = 6;
        EXPECT_EQ(rel.size() + rel.dropped_leading, expect) << sc.id();
    }
}

TEST(BuildRecurrence, ScheOriginCoefficients) {
    const auto rel = build_recurrence(kOnes, scheme_from_id("sche-I-origin"));
    ASSERT_EQ(rel.names[0], "S");
    EXPECT_LT(std::abs(rel.coeff(0, 1.0, 0.0) - 2.0), 1e-14);
    ASSERT_EQ(rel.names[1], "R");
    EXPECT_LT(std::abs(rel.coeff(1, 0.0, 0.0) + 1.0), 1e-14);
}

TEST(BuildRecurrence, TricCubicPIsConstant) {
    const ConfluentHeun eq{Variant::TCHE, cplx{0.3, 0.1}, cplx{-0.2, 0.5}, cplx{0.7, -0.1}, cplx{0.6, 0.2}, cplx{0.4, -0.3}};
    const auto rel = build_recurrence(eq, scheme_from_id("tche-IIc-z0"));
    const cplx z0 = eq.q / eq.alpha;
    const cplx expect = -eq.epsilon * (eq.delta + 2.0 * eq.epsilon * z0);
    ASSERT_EQ(rel.names.back(), "P");
    for (double n : {0.0, 3.0, 17.0}) EXPECT_LT(rel_err(rel.coeff(rel.size() - 1, n, 0.0), expect), 1e-13);
}

TEST(BuildRecurrence, PreconditionsNamed) {
    ConfluentHeun eq = kOnes;
    eq.epsilon = 0.0;
    try {
        build_recurrence(eq, scheme_from_id("sche-I-origin"));
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("ε ≠ 0"), std::string::npos);
    }
    eq = kOnes;
    eq.alpha = 0.0;
    EXPECT_THROW(build_recurrence(eq, scheme_from_id("sche-I-z0")), PreconditionError);
    ConfluentHeun dche{Variant::DCHE, 0.0, 1.0, 1.0, 1.0, 1.0};
    EXPECT_THROW(build_recurrence(dche, scheme_from_id("dche-I-origin")), PreconditionError);
    ConfluentHeun bche{Variant::BCHE, 1.0, 1.0, 1.0, 1.0, 1.0};
    EXPECT_THROW(build_recurrence(bche, scheme_from_id("bche-I-origin", cplx{0.0, 0.0})), PreconditionError);
}

TEST(Exponents, Examples) {
    const ConfluentHeun eq{Variant::SCHE, cplx{0.4, 0.2}, 0.3, 0.5, 0.7, 0.2};
    const auto mus = admissible_exponents(eq, scheme_from_id("sche-I-origin"));
    ASSERT_EQ(mus.size(), 2u);
    EXPECT_LT(std::abs(mus[0]), 1e-12);
    EXPECT_LT(std::abs(mus[1] + eq.gamma), 1e-12);

    const auto rel = build_recurrence(eq, scheme_from_id("sche-I-z0"));
    ASSERT_EQ(rel.exponents.size(), 1u);
    EXPECT_LT(std::abs(rel.exponents[0] - 2.0), 1e-12);
    EXPECT_TRUE(rel.logarithmic_branch_excluded);

    const ConfluentHeun dche{Variant::DCHE, cplx{0.4, 0.2}, 0.3, 0.5, 0.7, 0.2};
    const auto dz = admissible_exponents(dche, scheme_from_id("dche-I-z0"));
    ASSERT_EQ(dz.size(), 1u);
    EXPECT_LT(std::abs(dz[0] - 2.0), 1e-12);
}

TEST(Exponents, LeadingTermVanishesAtN0) {
    Draws d(42);
    for (const auto& sc : all_schemes()) {
        const auto rel = build_recurrence(d.admissible(sc), sc);
        for (cplx mu : rel.exponents)
            EXPECT_LT(std::abs(rel.coeff(0, 0.0, mu)), 1e-10 * (1.0 + rel.terms[0].magnitude_at(mu))) << sc.id();
    }
}

TEST(Generate, Examples) {
    const auto rel = build_recurrence(kOnes, scheme_from_id("sche-I-origin"));
    const auto seq = generate_coefficients(rel, 0.0, 1);
    EXPECT_EQ(seq.c[0], cplx(1.0));
    EXPECT_LT(std::abs(seq.c[1] - 0.5), 1e-14);
    EXPECT_EQ(generate_coefficients(rel, 0.0, 0).c, std::vector<cplx>{1.0});
    // the order-0 residual of the v-operator confirms c1
    const auto op = v_operator(kOnes, scheme_from_id("sche-I-origin"));
    EXPECT_LE(residual_power_series(op, 0.0, seq.c, 0.0).max_relative(), 1e-14);
}

TEST(Generate, InteriorDegeneracyRaises) {
    // BCHE type II about z0 has exponents {2, 0}; mu = 0 is logarithmic in general
    const ConfluentHeun eq{Variant::BCHE, cplx{0.4, 0.2}, cplx{0.3, -0.1}, cplx{0.5, 0.2}, cplx{0.7, 0.1}, cplx{0.2, 0.3}};
    const auto rel = build_recurrence(eq, scheme_from_id("bche-II-z0"));
    ASSERT_EQ(rel.exponents.size(), 2u);
    EXPECT_THROW(generate_coefficients(rel, 0.0, 10), DegenerateIndexError);
    // branch switching picks the other exponent
    EXPECT_LT(std::abs(generate_first_admissible(rel, 10).mu - 2.0), 1e-12);
}

// The master property: generated coefficients annihilate the derived
// v-operator order by order.
TEST(Generate, ResidualClosureAllSchemes) {
    Draws d(43);
    for (const auto& sc : all_schemes()) {
        for (int trial = 0; trial < 20; ++trial) {
            const ConfluentHeun eq = d.admissible(sc);
            const auto rel = build_recurrence(eq, sc);
            const auto op = v_operator(eq, sc);
            for (cplx mu : rel.exponents) {
                CoefficientSequence seq;
                try {
                    seq = generate_coefficients(rel, mu, 24);
                } catch (const DegenerateIndexError&) {
                    continue; // logarithmic branch
                }
                EXPECT_LE(residual_power_series(op, mu, seq.c, rel.z1).max_relative(), 1e-10) << sc.id();
            }
        }
    }
}

TEST(TwoTerm, TriconfluentExamples) {
    const cplx e = 1.0, a = 3.0, q = 1.0;
    const ConfluentHeun eq{Variant::TCHE, e * q * q / (a * a), -2.0 * e * q / a, e, a, q};
    EXPECT_EQ(two_term_closed_form(TwoTermCase::TriconfluentCubic, eq, 0), cplx(1.0));
    EXPECT_EQ(two_term_closed_form(TwoTermCase::TriconfluentCubic, eq, 1), cplx(0.0));
    EXPECT_LT(std::abs(two_term_closed_form(TwoTermCase::TriconfluentCubic, eq, 3) + 1.0), 1e-14);
}

TEST(TwoTerm, TriconfluentMatchesRecurrence) {
    Draws d(44);
    for (int trial = 0; trial < 5; ++trial) {
        ConfluentHeun eq = d.equation(Variant::TCHE);
        const cplx z0 = eq.q / eq.alpha;
        eq.gamma = eq.epsilon * z0 * z0;
        eq.delta = -2.0 * eq.epsilon * z0;
        const auto rel = build_recurrence(eq, scheme_from_id("tche-IIc-z0"));
        const auto seq = generate_coefficients(rel, 0.0, 30);
        for (std::size_t n = 0; n <= 30; ++n) {
            const cplx ref = two_term_closed_form(TwoTermCase::TriconfluentCubic, eq, n);
            EXPECT_LE(std::abs(seq.c[n] - ref), 1e-12 * std::max(std::abs(ref), 1e-300)) << n;
        }
    }
}

TEST(TwoTerm, BiconfluentMatchesRecurrence) {
    Draws d(45);
    for (int trial = 0; trial < 5; ++trial) {
        ConfluentHeun eq = d.equation(Variant::BCHE);
        eq.q = 0.0;
        eq.delta = 0.0;
        const auto rel = build_recurrence(eq, scheme_from_id("bche-II-origin"));
        for (cplx mu : rel.exponents) {
            const auto seq = generate_coefficients(rel, mu, 30);
            // closed-form indexing: c_n there is our c_{n-1}, with mu shifted by one
            for (std::size_t n = 1; n <= 31; ++n) {
                const cplx ref = two_term_closed_form(TwoTermCase::BiconfluentOrigin, eq, n, mu - 1.0);
                EXPECT_LE(std::abs(seq.c[n - 1] - ref), 1e-12 * std::max(std::abs(ref), 1e-300)) << n;
            }
        }
    }
}

TEST(Reductions, KnownSpecializations) {
    for (const auto& rc : heun::testing::reduction_cases()) {
        const auto sc = scheme_from_id(rc.scheme, rc.lambda);
        const auto rep = detect_reductions(rc.eq, sc);
        std::set<std::string> van;
        for (std::size_t j = 0; j < rep.names.size(); ++j)
            if (rep.vanishing[j]) van.insert(rep.names[j]);
        EXPECT_EQ(van, rc.vanishing) << rc.label;
        EXPECT_EQ(rep.effective_terms, rc.effective_terms) << rc.label;
        EXPECT_EQ(rep.successive, rc.successive) << rc.label;
        EXPECT_LE(heun::testing::vanishing_level(rc.eq, sc, rep), 1e-13) << rc.label;
    }
}

TEST(Reductions, ScheQZeroThreeTermAndGenericFull) {
    ConfluentHeun eq{Variant::SCHE, cplx{0.4, 0.2}, 0.3, 0.5, 0.7, 0.2};
    EXPECT_EQ(detect_reductions(eq, scheme_from_id("sche-I-origin")).effective_terms, 4u);
    eq.q = 0.0;
    EXPECT_EQ(detect_reductions(eq, scheme_from_id("sche-I-origin")).effective_terms, 3u);
}

TEST(Reductions, LambdaChoicesForKummerCase) {
    ConfluentHeun eq{Variant::BCHE, cplx{0.4, 0.2}, cplx{0.3, -0.1}, 0.0, cplx{0.7, 0.1}, cplx{0.2, 0.3}};
    const auto rep = detect_reductions(eq, scheme_from_id("bche-I-origin"));
    ASSERT_EQ(rep.lambda_choices.size(), 2u);
    for (const auto& c : rep.lambda_choices)
        EXPECT_LT(std::abs(c.lambda * c.lambda - eq.delta * c.lambda + eq.alpha), 1e-12);
}
