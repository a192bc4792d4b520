#include "cohom/laurent.hpp"
#include "cohom/rational.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

using namespace cohom;
using cohom::support::random_laurent;
using L = RationalLaurent;

namespace {

L x() { return L::x(); }
L xn(int n, Rational c = 1) { return L::monomial(c, n); }

} // namespace

TEST(Rational, LowestTermsAndExactArithmetic) {
    Rational r = Rational(6) / Rational(-4);
    EXPECT_EQ(to_fraction_string(r), "-3/2");
    EXPECT_GT(denominator_of(r), 0);
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(1, 10) * 10, Rational(1));
}

TEST(Rational, Parsing) {
    EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
    EXPECT_EQ(parse_rational("-2"), Rational(-2));
    EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
    EXPECT_EQ(parse_rational("1.5e-2"), Rational(3, 200));
    EXPECT_EQ(parse_rational(" -0.5/3 "), Rational(-1, 6));
    EXPECT_THROW(parse_rational("1/0"), InvalidArgument);
    EXPECT_THROW(parse_rational("abc"), InvalidArgument);
    EXPECT_THROW(parse_rational(""), InvalidArgument);
    EXPECT_THROW(parse_rational("1/-2"), InvalidArgument);
    EXPECT_THROW(parse_rational("1e99999"), InvalidArgument);
}

TEST(Laurent, AddExamples) {
    EXPECT_TRUE(add(x(), -x()).is_zero());
    EXPECT_EQ(add(xn(-1) + L(1), L(1)), xn(-1) + L(2));
    EXPECT_TRUE(add(xn(2, 2) - x(), x() - xn(2, 2)).is_zero());
    EXPECT_TRUE((x() - x()).terms().empty());
}

TEST(Laurent, MulExamples) {
    EXPECT_EQ(mul(x() + L(1), xn(-1)), L(1) + xn(-1));
    EXPECT_EQ(mul(x() - L(1), x() + L(1)), xn(2) - L(1));
    EXPECT_TRUE(mul(xn(3) + xn(-2, 7), L()).is_zero());
}

TEST(Laurent, DerivativeExamples) {
    EXPECT_EQ(ddx(xn(2)), xn(1, 2));
    EXPECT_EQ(ddx(xn(-1)), xn(-2, -1));
    EXPECT_TRUE(ddx(L(5)).is_zero());
}

TEST(Laurent, EvalExamples) {
    EXPECT_DOUBLE_EQ(eval_at(xn(2) - L(1), 2.0), 3.0);
    EXPECT_DOUBLE_EQ(eval_at(xn(-1), 0.5), 2.0);
    EXPECT_EQ(eval_at(xn(-1), Rational(1, 2)), Rational(2));
    EXPECT_DOUBLE_EQ(eval_at(L(), 17.0), 0.0);
    EXPECT_EQ(eval_at(L(), Rational(0)), Rational(0));
    EXPECT_THROW(eval_at(xn(-1), 0.0), ZeroArgumentError);
    EXPECT_THROW(eval_at(xn(-1) + L(3), Rational(0)), ZeroArgumentError);
    EXPECT_DOUBLE_EQ(eval_at(xn(2) + L(3), 0.0), 3.0);
}

TEST(Laurent, CanonicalText) {
    EXPECT_EQ((xn(2, 2) - xn(-1)).to_string(), "2*x^2 - x^-1");
    EXPECT_EQ((L(-1) + x()).to_string(), "x - 1");
    EXPECT_EQ(xn(3, Rational(-3, 2)).to_string("y"), "-3/2*y^3");
    EXPECT_EQ(L().to_string(), "0");
}

TEST(Laurent, NoStoredZeros) {
    L p = L::from_terms({{2, Rational(1)}, {2, Rational(-1)}, {0, Rational(0)}, {-1, Rational(3)}});
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.min_exponent(), -1);
    EXPECT_THROW(L().max_exponent(), DomainError);
}

TEST(LaurentProperties, RingAxioms) {
    for (int i = 0; i < 300; ++i) {
        L p = random_laurent(), q = random_laurent(), r = random_laurent();
        EXPECT_EQ((p + q) + r, p + (q + r));
        EXPECT_EQ(p + q, q + p);
        EXPECT_EQ((p * q) * r, p * (q * r));
        EXPECT_EQ(p * q, q * p);
        EXPECT_EQ(p * (q + r), p * q + p * r);
        EXPECT_TRUE((p - p).is_zero());
    }
}

TEST(LaurentProperties, Leibniz) {
    for (int i = 0; i < 300; ++i) {
        L p = random_laurent(), q = random_laurent();
        EXPECT_EQ(ddx(p * q), ddx(p) * q + p * ddx(q));
    }
}

TEST(LaurentProperties, EvaluationIsAHomomorphism) {
    for (int i = 0; i < 300; ++i) {
        L p = random_laurent(), q = random_laurent();
        Rational r = support::random_rational();
        if (r.is_zero()) r = Rational(7, 3);
        EXPECT_EQ(eval_at(p * q, r), eval_at(p, r) * eval_at(q, r));
        EXPECT_EQ(eval_at(p + q, r), eval_at(p, r) + eval_at(q, r));
        double x0 = support::uniform(0.2, 3.0) * (support::uniform_int(0, 1) ? 1 : -1);
        double lhs = eval_at(p * q, x0), rhs = eval_at(p, x0) * eval_at(q, x0);
        double scale = 0;
        for (const auto& [n, c] : (p * q).terms()) scale += std::abs(to_double(c)) * std::pow(std::abs(x0), n);
        for (const auto& [n, c] : p.terms())
            for (const auto& [m, d] : q.terms())
                scale += std::abs(to_double(c * d)) * std::pow(std::abs(x0), n + m);
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (scale + 1e-300));
    }
}

TEST(Laurent, ExactRationalEvalMatchesFloat) {
    for (int i = 0; i < 100; ++i) {
        L p = random_laurent();
        Rational r(support::uniform_int(1, 9), support::uniform_int(1, 9));
        EXPECT_NEAR(to_double(eval_at(p, r)), eval_at(p, to_double(r)), 1e-9 * (1 + std::abs(to_double(eval_at(p, r)))));
    }
}
