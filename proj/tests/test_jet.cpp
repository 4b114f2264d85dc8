#include "loewner/jet.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace loewner;
using loewner::testutil::expect_cx_near;
using loewner::testutil::expect_jet_near;
using loewner::testutil::koebe_jet;
using loewner::testutil::random_jet;

constexpr double kTight = 1e-12;

TEST(Jet1, AddTruncatesToCommonOrder) {
    Jet1 a(std::vector<cx>{{1, 0}, {2, 0}});            // 1 + 2z
    Jet1 b(std::vector<cx>{{0, 0}, {3, 0}, {1, 0}});    // 3z + z^2
    Jet1 r = add(a, b);
    EXPECT_EQ(r.order(), 1);
    expect_cx_near(r.coeff(0), {1, 0}, 0.0);
    expect_cx_near(r.coeff(1), {5, 0}, 0.0);
}

TEST(Jet1, MulExactPolynomials) {
    Jet1 a(std::vector<cx>{{1, 0}, {1, 0}, {0, 0}});   // 1 + z
    Jet1 b(std::vector<cx>{{1, 0}, {-1, 0}, {0, 0}});  // 1 - z
    Jet1 r = mul(a, b);                                 // 1 - z^2
    expect_cx_near(r.coeff(0), {1, 0}, 0.0);
    expect_cx_near(r.coeff(1), {0, 0}, 0.0);
    expect_cx_near(r.coeff(2), {-1, 0}, 0.0);

    Jet1 c = Jet1::identity(4) + Jet1::monomial({1, 0}, 2, 4);  // z + z^2
    Jet1 sq = mul(c, c);  // z^2 + 2z^3 + z^4
    expect_cx_near(sq.coeff(2), {1, 0}, 0.0);
    expect_cx_near(sq.coeff(3), {2, 0}, 0.0);
    expect_cx_near(sq.coeff(4), {1, 0}, 0.0);
}

TEST(Jet1, DerivativeDropsOneOrder) {
    Jet1 a(std::vector<cx>{{1, 0}, {2, 0}, {3, 0}});  // 1 + 2z + 3z^2
    Jet1 r = derivative(a);
    EXPECT_EQ(r.order(), 1);
    expect_cx_near(r.coeff(0), {2, 0}, 0.0);
    expect_cx_near(r.coeff(1), {6, 0}, 0.0);
}

TEST(Jet1, ComposeHorner) {
    // outer w + w^2, inner z + z^3, order 3: z + z^2 + z^3
    Jet1 outer = Jet1::identity(3) + Jet1::monomial({1, 0}, 2, 3);
    Jet1 inner = Jet1::identity(3) + Jet1::monomial({1, 0}, 3, 3);
    Jet1 r = compose(outer, inner);
    expect_cx_near(r.coeff(0), {0, 0}, 0.0);
    expect_cx_near(r.coeff(1), {1, 0}, 0.0);
    expect_cx_near(r.coeff(2), {1, 0}, 0.0);
    expect_cx_near(r.coeff(3), {1, 0}, 0.0);
}

TEST(Jet1, ComposeRejectsNonzeroConstantInner) {
    Jet1 outer = Jet1::identity(3);
    Jet1 inner = Jet1::constant({1, 0}, 3);
    EXPECT_THROW(compose(outer, inner), ValidationError);
}

TEST(Jet1, PowerOfKoebeJet) {
    // k(z)^2 = z^2 (1-z)^{-4} = z^2 + 4z^3 + 10z^4 + 20z^5 + ...
    Jet1 k2 = power(koebe_jet(5), 2);
    expect_cx_near(k2.coeff(2), {1, 0}, kTight);
    expect_cx_near(k2.coeff(3), {4, 0}, kTight);
    expect_cx_near(k2.coeff(4), {10, 0}, kTight);
    expect_cx_near(k2.coeff(5), {20, 0}, kTight);
}

TEST(Jet1, UnitReciprocalGeometricSeries) {
    Jet1 a = Jet1::constant({1, 0}, 8) - Jet1::identity(8);  // 1 - z
    Jet1 r = unit_reciprocal(a);
    for (int k = 0; k <= 8; ++k) expect_cx_near(r.coeff(k), {1, 0}, kTight);
    expect_jet_near(mul(a, r), Jet1::constant({1, 0}, 8), kTight);
}

TEST(Jet1, UnitReciprocalRandomRoundTrip) {
    Rng rng(20260801);
    for (int rep = 0; rep < 20; ++rep) {
        Jet1 a = random_jet(rng, 10);
        a.at(0) = cx{1.0, 0.0} + 0.3 * a.coeff(0);
        Jet1 r = unit_reciprocal(a);
        expect_jet_near(mul(a, r), Jet1::constant({1, 0}, 10), 1e-12);
    }
}

TEST(Jet1, UnitReciprocalRejectsZeroConstant) {
    EXPECT_THROW(unit_reciprocal(Jet1::identity(4)), NumericalError);
}

TEST(Jet1, RingAxiomsOnRandomJets) {
    Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        Jet1 a = random_jet(rng, 8);
        Jet1 b = random_jet(rng, 8);
        Jet1 c = random_jet(rng, 8);
        expect_jet_near(add(a, b), add(b, a), 0.0);
        expect_jet_near(add(add(a, b), c), add(a, add(b, c)), kTight);
        expect_jet_near(mul(a, b), mul(b, a), kTight);
        expect_jet_near(mul(mul(a, b), c), mul(a, mul(b, c)), kTight);
        expect_jet_near(mul(a, add(b, c)), add(mul(a, b), mul(a, c)), kTight);
    }
}

TEST(Jet1, LeibnizRule) {
    Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        Jet1 a = random_jet(rng, 9);
        Jet1 b = random_jet(rng, 9);
        Jet1 lhs = derivative(mul(a, b));
        Jet1 rhs = add(mul(derivative(a), b), mul(a, derivative(b)));
        expect_jet_near(lhs, rhs, kTight);
    }
}

TEST(Jet1, ChainRule) {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        Jet1 outer = random_jet(rng, 9);
        Jet1 inner = random_jet(rng, 9);
        inner.at(0) = cx{0.0};
        Jet1 lhs = derivative(compose(outer, inner));
        Jet1 rhs = mul(compose(derivative(outer), inner), derivative(inner));
        expect_jet_near(lhs, rhs, 1e-11);
    }
}

TEST(Jet1, ComposeAssociativity) {
    Rng rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        Jet1 a = random_jet(rng, 8);
        Jet1 b = random_jet(rng, 8);
        Jet1 c = random_jet(rng, 8);
        b.at(0) = cx{0.0};
        c.at(0) = cx{0.0};
        expect_jet_near(compose(compose(a, b), c), compose(a, compose(b, c)),
                        1e-11);
    }
}

TEST(Jet1, EvaluateMatchesPolynomialArithmetic) {
    Jet1 a(std::vector<cx>{{1, 0}, {0, 2}, {-3, 1}});  // 1 + 2i z + (-3+i) z^2
    cx z{0.3, -0.2};
    cx expected = cx{1, 0} + cx{0, 2} * z + cx{-3, 1} * z * z;
    expect_cx_near(evaluate(a, z), expected, kTight);
}

TEST(Laurent, MonomialTimesPolynomial) {
    // z^{-1} stored on window [-1, 4] (exact above its single term)
    LaurentJet zinv = LaurentJet::zero(-1, 4);
    zinv.at(-1) = cx{1, 0};
    Jet1 p = Jet1::identity(2) + Jet1::monomial({2, 0}, 2, 2);  // z + 2z^2
    LaurentJet r = mul(zinv, LaurentJet::from_taylor(p));
    EXPECT_EQ(r.low(), -1);
    EXPECT_GE(r.high(), 1);
    expect_cx_near(r.coeff(-1), {0, 0}, 0.0);
    expect_cx_near(r.coeff(0), {1, 0}, 0.0);
    expect_cx_near(r.coeff(1), {2, 0}, 0.0);
}

TEST(Laurent, PoleOrdersAddUnderMul) {
    LaurentJet a = LaurentJet::zero(-2, 3);
    a.at(-2) = cx{1, 0};
    a.at(0) = cx{4, 0};
    LaurentJet b = LaurentJet::zero(-1, 3);
    b.at(-1) = cx{2, 0};
    LaurentJet r = mul(a, b);
    EXPECT_EQ(r.lowest_nonzero(), -3);
    EXPECT_EQ(r.pole_order(), 3);
    expect_cx_near(r.coeff(-3), {2, 0}, 0.0);
    expect_cx_near(r.coeff(-1), {8, 0}, 0.0);
}

TEST(Laurent, ReciprocalOfKoebeJet) {
    // (1-z)^2 / z = z^{-1} - 2 + z, all higher coefficients zero
    LaurentJet r = reciprocal(koebe_jet(10));
    EXPECT_EQ(r.low(), -1);
    EXPECT_EQ(r.high(), 8);
    expect_cx_near(r.coeff(-1), {1, 0}, kTight);
    expect_cx_near(r.coeff(0), {-2, 0}, kTight);
    expect_cx_near(r.coeff(1), {1, 0}, kTight);
    for (int e = 2; e <= r.high(); ++e)
        expect_cx_near(r.coeff(e), {0, 0}, kTight);
}

TEST(Laurent, ReciprocalTimesSelfIsOne) {
    Rng rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        Jet1 a = random_jet(rng, 10, 0.3);
        a.at(0) = cx{0.0};
        a.at(1) = cx{1.0, 0.0};  // valuation exactly 1
        LaurentJet la = LaurentJet::from_taylor(a);
        LaurentJet prod = mul(la, reciprocal(la));
        expect_cx_near(prod.coeff(0), {1, 0}, 1e-12);
        for (int e = prod.low(); e <= prod.high(); ++e) {
            if (e == 0) continue;
            expect_cx_near(prod.coeff(e), {0, 0}, 1e-11);
        }
    }
}

TEST(Laurent, ReciprocalRejectsZeroJet) {
    EXPECT_THROW(reciprocal(Jet1(6)), NumericalError);
}

TEST(Laurent, WindowOutsideKnownRangeThrows) {
    LaurentJet a = LaurentJet::zero(-1, 3);
    EXPECT_THROW(a.window(-2, 1), ValidationError);
    EXPECT_THROW(a.window(0, 4), ValidationError);
    EXPECT_NO_THROW(a.window(-1, 3));
}

TEST(Laurent, EvaluateMixedWindow) {
    LaurentJet a = LaurentJet::zero(-2, 1);
    a.at(-2) = cx{1, 0};
    a.at(-1) = cx{4, 0};
    a.at(0) = cx{6, 0};
    a.at(1) = cx{4, 0};
    cx z{0.5, 0.5};
    cx w = 1.0 / z;
    cx expected = w * w + 4.0 * w + cx{6, 0} + 4.0 * z;
    expect_cx_near(evaluate(a, z), expected, 1e-12);
}
